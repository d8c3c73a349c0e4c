#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>

#include "genmetrics/error.hpp"
#include "genmetrics/featureset.hpp"

namespace genmetrics {

namespace {

void put_u64(std::vector<char>& out, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

std::uint64_t get_u64(std::span<const char> bytes, std::size_t offset) {
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) {
        v |= static_cast<std::uint64_t>(static_cast<unsigned char>(bytes[offset + i])) << (8 * i);
    }
    return v;
}

std::vector<char> read_all(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorCode::io, "cannot open '" + path.string() + "' for reading");
    std::vector<char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (in.bad()) fail(ErrorCode::io, "read failure on '" + path.string() + "'");
    return bytes;
}

}  // namespace

std::vector<char> encode_fset(const FeatureSet& set) {
    const auto values = set.values();
    std::vector<float> narrowed(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) {
        narrowed[i] = static_cast<float>(values[i]);
        if (!std::isfinite(narrowed[i])) {
            fail(ErrorCode::validation, "value at flat index " + std::to_string(i) +
                                            " is not representable as a finite float32");
        }
    }

    std::vector<char> out;
    out.reserve(kFsetHeaderBytes + 4 * narrowed.size());
    for (const char c : std::string_view("FSET")) out.push_back(c);
    out.push_back(static_cast<char>(kFsetVersion));
    out.push_back(static_cast<char>(set.space()));
    out.push_back(0);
    out.push_back(0);
    put_u64(out, set.rows());
    put_u64(out, set.cols());
    for (const float f : narrowed) {
        const auto bits = std::bit_cast<std::uint32_t>(f);
        for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((bits >> (8 * i)) & 0xff));
    }
    return out;
}

FeatureSet decode_fset(std::span<const char> bytes) {
    if (bytes.size() < 4 || std::memcmp(bytes.data(), "FSET", 4) != 0) {
        fail(ErrorCode::format, "missing FSET magic");
    }
    if (bytes.size() < kFsetHeaderBytes) fail(ErrorCode::truncation, "FSET header is truncated");
    if (static_cast<std::uint8_t>(bytes[4]) != kFsetVersion) {
        fail(ErrorCode::format, "unsupported FSET version " +
                                    std::to_string(static_cast<unsigned char>(bytes[4])));
    }
    const auto tag_byte = static_cast<std::uint8_t>(bytes[5]);
    if (tag_byte > static_cast<std::uint8_t>(SpaceTag::softmax)) {
        fail(ErrorCode::format, "unknown space tag byte " + std::to_string(tag_byte));
    }
    if (bytes[6] != 0 || bytes[7] != 0) fail(ErrorCode::format, "reserved FSET bytes are not zero");

    const std::uint64_t n = get_u64(bytes, 8);
    const std::uint64_t d = get_u64(bytes, 16);
    const std::size_t payload = bytes.size() - kFsetHeaderBytes;
    if (d != 0 && n > (UINT64_MAX / 4) / d) fail(ErrorCode::format, "FSET header overflows");
    if (payload != n * d * 4) {
        fail(ErrorCode::truncation, "FSET header declares " + std::to_string(n) + "x" +
                                        std::to_string(d) + " values but payload holds " +
                                        std::to_string(payload / 4) + " floats");
    }

    std::vector<double> values(n * d);
    for (std::size_t i = 0; i < values.size(); ++i) {
        std::uint32_t bits = 0;
        for (int b = 0; b < 4; ++b) {
            bits |= static_cast<std::uint32_t>(
                        static_cast<unsigned char>(bytes[kFsetHeaderBytes + 4 * i + b]))
                    << (8 * b);
        }
        values[i] = std::bit_cast<float>(bits);
    }
    return FeatureSet(std::move(values), n, d, static_cast<SpaceTag>(tag_byte));
}

FeatureSet parse_csv_features(std::string_view text) {
    std::vector<double> values;
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::size_t line_no = 0;
    while (!text.empty()) {
        const auto eol = text.find('\n');
        auto line = text.substr(0, eol);
        text = eol == std::string_view::npos ? std::string_view{} : text.substr(eol + 1);
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (line.find_first_not_of(" \t") == std::string_view::npos) continue;

        std::size_t fields = 0;
        while (true) {
            const auto comma = line.find(',');
            auto field = line.substr(0, comma);
            while (!field.empty() && (field.front() == ' ' || field.front() == '\t')) field.remove_prefix(1);
            while (!field.empty() && (field.back() == ' ' || field.back() == '\t')) field.remove_suffix(1);
            double v = 0.0;
            const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
            if (ec != std::errc{} || ptr != field.data() + field.size()) {
                fail(ErrorCode::format, "CSV line " + std::to_string(line_no) + ": cannot parse '" +
                                            std::string(field) + "'");
            }
            values.push_back(v);
            ++fields;
            if (comma == std::string_view::npos) break;
            line = line.substr(comma + 1);
        }
        if (rows == 0) {
            cols = fields;
        } else if (fields != cols) {
            fail(ErrorCode::format, "CSV line " + std::to_string(line_no) + " has " +
                                        std::to_string(fields) + " fields, expected " +
                                        std::to_string(cols));
        }
        ++rows;
    }
    if (rows == 0) fail(ErrorCode::format, "CSV file holds no rows");
    return FeatureSet(std::move(values), rows, cols, SpaceTag::feature);
}

FeatureSet load_feature_file(const std::filesystem::path& path) {
    const auto bytes = read_all(path);
    auto set = path.extension() == ".csv"
                   ? parse_csv_features(std::string_view(bytes.data(), bytes.size()))
                   : decode_fset(bytes);
    set.set_name(path.stem().string());
    return set;
}

void write_feature_file(const FeatureSet& set, const std::filesystem::path& path) {
    const auto bytes = encode_fset(set);  // validates before the file is touched
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorCode::io, "cannot open '" + path.string() + "' for writing");
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    out.flush();
    if (!out) fail(ErrorCode::io, "write failure on '" + path.string() + "'");
}

}  // namespace genmetrics
