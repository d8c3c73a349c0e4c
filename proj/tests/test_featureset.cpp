#include <algorithm>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <set>

#include "helpers.hpp"
#include "genmetrics/parallel.hpp"

using namespace genmetrics;
using testutil::float_set;
using testutil::normal_set;
using testutil::points;

namespace {

std::filesystem::path temp_file(const std::string& name) {
    const auto dir = std::filesystem::temp_directory_path() / "genmetrics_unit";
    std::filesystem::create_directories(dir);
    return dir / name;
}

void write_bytes(const std::filesystem::path& p, const std::vector<char>& bytes) {
    std::ofstream out(p, std::ios::binary);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

}  // namespace

// --- SeededRng ---------------------------------------------------------------

TEST(SeededRng, SameSeedSameStream) {
    SeededRng a(42), b(42);
    for (int i = 0; i < 100; ++i) {
        EXPECT_EQ(a.next_u64(), b.next_u64());
        EXPECT_EQ(a.normal(), b.normal());
    }
}

TEST(SeededRng, Mt19937ReferenceOutput) {
    // The 10000th output of a default-seeded mt19937_64 is fixed by the standard.
    SeededRng rng(5489u);
    std::uint64_t v = 0;
    for (int i = 0; i < 10000; ++i) v = rng.next_u64();
    EXPECT_EQ(v, 9981545732273789042ull);
}

TEST(SeededRng, BelowStaysInRangeAndCoversIt) {
    SeededRng rng(1);
    std::set<std::uint64_t> seen;
    for (int i = 0; i < 2000; ++i) {
        const auto v = rng.below(7);
        ASSERT_LT(v, 7u);
        seen.insert(v);
    }
    EXPECT_EQ(seen.size(), 7u);
    EXPECT_ERROR_CODE(rng.below(0), ErrorCode::domain);
}

TEST(SeededRng, UniformAndNormalMoments) {
    SeededRng rng(9);
    const int n = 200000;
    double su = 0, sn = 0, sn2 = 0;
    for (int i = 0; i < n; ++i) {
        const double u = rng.uniform01();
        ASSERT_GE(u, 0.0);
        ASSERT_LT(u, 1.0);
        su += u;
        const double z = rng.normal();
        sn += z;
        sn2 += z * z;
    }
    // 5-sigma bands.
    EXPECT_NEAR(su / n, 0.5, 5 * std::sqrt(1.0 / 12 / n));
    EXPECT_NEAR(sn / n, 0.0, 5 / std::sqrt(n));
    EXPECT_NEAR(sn2 / n, 1.0, 5 * std::sqrt(2.0 / n));
}

TEST(SeededRng, SampleWithoutReplacementIsDistinct) {
    SeededRng rng(3);
    const auto idx = rng.sample_without_replacement(100, 60);
    EXPECT_EQ(std::set<std::size_t>(idx.begin(), idx.end()).size(), 60u);
    EXPECT_TRUE(std::all_of(idx.begin(), idx.end(), [](std::size_t i) { return i < 100; }));
    EXPECT_ERROR_CODE(rng.sample_without_replacement(3, 4), ErrorCode::insufficient_samples);
}

TEST(SeededRng, DerivedStreamsAreReproducibleAndDistinct) {
    const SeededRng base(77);
    auto a = base.derive(1), b = base.derive(1), c = base.derive(2);
    const auto x = a.next_u64();
    EXPECT_EQ(x, b.next_u64());
    EXPECT_NE(x, c.next_u64());
}

// --- FeatureSet invariants ------------------------------------------------------

TEST(FeatureSet, RejectsEmptyAndNonFinite) {
    EXPECT_ERROR_CODE(FeatureSet({}, 0, 3), ErrorCode::validation);
    EXPECT_ERROR_CODE(FeatureSet({1.0, NAN}, 1, 2), ErrorCode::validation);
    EXPECT_ERROR_CODE(FeatureSet({1.0, INFINITY}, 2, 1), ErrorCode::validation);
    EXPECT_ERROR_CODE(FeatureSet({1.0, 2.0, 3.0}, 2, 2), ErrorCode::validation);
}

TEST(FeatureSet, SoftmaxRowsMustBeDistributions) {
    EXPECT_NO_THROW(FeatureSet({0.25, 0.75}, 1, 2, SpaceTag::softmax));
    EXPECT_ERROR_CODE(FeatureSet({0.5, 0.6}, 1, 2, SpaceTag::softmax), ErrorCode::validation);
    EXPECT_ERROR_CODE(FeatureSet({-0.1, 1.1}, 1, 2, SpaceTag::softmax), ErrorCode::validation);
}

TEST(FeatureSet, ConcatNeedsMatchingShapeAndSpace) {
    const auto a = points({{1, 2}});
    const auto b = points({{3, 4}, {5, 6}});
    const auto c = concat(a, b);
    EXPECT_EQ(c.rows(), 3u);
    EXPECT_EQ(c.at(2, 1), 6.0);
    EXPECT_ERROR_CODE(concat(a, points({{1, 2, 3}})), ErrorCode::dimension);
    EXPECT_ERROR_CODE(concat(a, a.retagged(SpaceTag::pixel)), ErrorCode::validation);
}

// --- FSET / CSV I/O ----------------------------------------------------------------

TEST(FeatureIo, RoundTripIsExact) {
    SeededRng rng(11);
    const auto set = float_set(37, 5, rng).retagged(SpaceTag::pixel);
    const auto path = temp_file("roundtrip.fset");
    write_feature_file(set, path);
    EXPECT_EQ(load_feature_file(path), set);
}

TEST(FeatureIo, LargeRoundTripIsExact) {
    SeededRng rng(12);
    const auto set = float_set(2000, 512, rng);
    const auto path = temp_file("large.fset");
    write_feature_file(set, path);
    EXPECT_EQ(load_feature_file(path), set);
}

TEST(FeatureIo, SingleZeroValueIs28Bytes) {
    const FeatureSet set({0.0}, 1, 1);
    const auto path = temp_file("one.fset");
    write_feature_file(set, path);
    EXPECT_EQ(std::filesystem::file_size(path), 28u);
    const auto bytes = encode_fset(set);
    ASSERT_EQ(bytes.size(), 28u);
    EXPECT_EQ(std::memcmp(bytes.data(), "FSET", 4), 0);
    EXPECT_EQ(bytes[4], 1);
    EXPECT_EQ(bytes[5], 1);  // feature tag
    EXPECT_EQ(bytes[6], 0);
    EXPECT_EQ(bytes[7], 0);
    EXPECT_EQ(bytes[8], 1);   // n, little endian
    EXPECT_EQ(bytes[16], 1);  // d
}

TEST(FeatureIo, HeaderFieldsAreLittleEndian) {
    const FeatureSet set(std::vector<double>(300 * 2, 0.5), 300, 2, SpaceTag::softmax);
    const auto bytes = encode_fset(set);
    EXPECT_EQ(bytes[5], 2);
    EXPECT_EQ(static_cast<unsigned char>(bytes[8]), 300 % 256);
    EXPECT_EQ(static_cast<unsigned char>(bytes[9]), 300 / 256);
    float first;
    std::memcpy(&first, bytes.data() + 24, 4);
    EXPECT_EQ(first, 0.5f);
}

TEST(FeatureIo, BadMagicIsFormatError) {
    auto bytes = encode_fset(points({{1, 2}}));
    bytes[0] = 'X';
    EXPECT_ERROR_CODE(decode_fset(bytes), ErrorCode::format);
    const auto path = temp_file("badmagic.fset");
    write_bytes(path, bytes);
    EXPECT_ERROR_CODE(load_feature_file(path), ErrorCode::format);
}

TEST(FeatureIo, ShortPayloadIsTruncation) {
    // Header says 3 x 2 but only 5 floats follow.
    auto bytes = encode_fset(points({{1, 2}, {3, 4}, {5, 6}}));
    bytes.resize(bytes.size() - 4);
    EXPECT_ERROR_CODE(decode_fset(bytes), ErrorCode::truncation);
}

TEST(FeatureIo, VersionTagAndReservedBytesAreChecked) {
    const auto good = encode_fset(points({{1, 2}}));
    auto v = good;
    v[4] = 2;
    EXPECT_ERROR_CODE(decode_fset(v), ErrorCode::format);
    auto t = good;
    t[5] = 9;
    EXPECT_ERROR_CODE(decode_fset(t), ErrorCode::format);
    auto r = good;
    r[7] = 1;
    EXPECT_ERROR_CODE(decode_fset(r), ErrorCode::format);
}

TEST(FeatureIo, NanSetNeverReachesDisk) {
    const auto path = temp_file("nan.fset");
    std::filesystem::remove(path);
    EXPECT_ERROR_CODE(write_feature_file(FeatureSet({NAN}, 1, 1), path), ErrorCode::validation);
    EXPECT_FALSE(std::filesystem::exists(path));
}

TEST(FeatureIo, FloatOverflowRejectedBeforeWriting) {
    const auto path = temp_file("overflow.fset");
    std::filesystem::remove(path);
    EXPECT_ERROR_CODE(write_feature_file(FeatureSet({1e300}, 1, 1), path), ErrorCode::validation);
    EXPECT_FALSE(std::filesystem::exists(path));
}

TEST(FeatureIo, CsvLoadsAsFeatureSpace) {
    const auto path = temp_file("plain.csv");
    {
        std::ofstream out(path);
        out << "1.5,2\n-3,4e-1\n";
    }
    const auto set = load_feature_file(path);
    EXPECT_EQ(set.space(), SpaceTag::feature);
    EXPECT_EQ(set.rows(), 2u);
    EXPECT_EQ(set.cols(), 2u);
    EXPECT_EQ(set.at(1, 1), 0.4);  // CSV keeps double precision
    EXPECT_ERROR_CODE(parse_csv_features("1,2\n3\n"), ErrorCode::format);
    EXPECT_ERROR_CODE(parse_csv_features("1,abc\n"), ErrorCode::format);
}

TEST(FeatureIo, MissingFileIsIoError) {
    EXPECT_ERROR_CODE(load_feature_file(temp_file("does_not_exist.fset")), ErrorCode::io);
}

// --- pairwise distances ---------------------------------------------------------

TEST(PairwiseDistances, Examples) {
    const auto p = points({{0, 0}});
    EXPECT_EQ(pairwise_distances(p, p)(0, 0), 0.0);
    EXPECT_EQ(pairwise_distances(p, points({{3, 4}}))(0, 0), 5.0);
}

TEST(PairwiseDistances, TransposeSymmetryAndTriangle) {
    SeededRng rng(4);
    const auto a = normal_set(30, 6, rng);
    const auto b = normal_set(20, 6, rng);
    const auto ab = pairwise_distances(a, b);
    const auto ba = pairwise_distances(b, a);
    const auto aa = pairwise_distances(a, a);
    for (std::size_t i = 0; i < 30; ++i) {
        for (std::size_t j = 0; j < 20; ++j) {
            EXPECT_EQ(ab(i, j), ba(j, i));
            ASSERT_GE(ab(i, j), 0.0);
            for (std::size_t k = 0; k < 30; ++k) {
                ASSERT_LE(ab(i, j), aa(i, k) + ab(k, j) + 1e-12);
            }
        }
    }
}

TEST(PairwiseDistances, DimensionMismatch) {
    EXPECT_ERROR_CODE(pairwise_distances(points({{1, 2}}), points({{1, 2, 3}})), ErrorCode::dimension);
}

TEST(PairwiseDistances, IndependentOfThreadCount) {
    SeededRng rng(8);
    const auto a = normal_set(300, 10, rng);
    set_thread_count(1);
    const auto one = pairwise_distances(a, a);
    set_thread_count(4);
    const auto four = pairwise_distances(a, a);
    set_thread_count(0);
    EXPECT_TRUE(std::equal(one.values().begin(), one.values().end(), four.values().begin()));
}

// --- splits and mixes -----------------------------------------------------------

TEST(SeededSplit, WholeSetIsPermutation) {
    SeededRng rng(1);
    const auto set = normal_set(50, 2, rng);
    SeededRng split_rng(2);
    const std::vector<std::size_t> sizes{50};
    const auto parts = seeded_split(set, sizes, split_rng);
    ASSERT_EQ(parts.size(), 1u);
    std::multiset<double> x(set.values().begin(), set.values().end());
    std::multiset<double> y(parts[0].values().begin(), parts[0].values().end());
    EXPECT_EQ(x, y);
}

TEST(SeededSplit, DisjointAndDeterministic) {
    const std::vector<std::size_t> sizes{2000, 2000};
    SeededRng r1(5), r2(5);
    const auto a = split_indices(200000, sizes, r1);
    const auto b = split_indices(200000, sizes, r2);
    EXPECT_EQ(a, b);
    std::set<std::size_t> first(a[0].begin(), a[0].end());
    EXPECT_EQ(first.size(), 2000u);
    for (const auto i : a[1]) EXPECT_EQ(first.count(i), 0u);
    SeededRng r3(5);
    const std::vector<std::size_t> too_many{6, 5};
    EXPECT_ERROR_CODE(split_indices(10, too_many, r3), ErrorCode::insufficient_samples);
}

TEST(MixSets, CountsAndBoundaries) {
    SeededRng rng(3);
    const auto real = normal_set(3000, 1, rng, -100.0);
    const auto other = normal_set(3000, 1, rng, 100.0);
    const auto from_other = [](const FeatureSet& s) {
        std::size_t c = 0;
        for (std::size_t i = 0; i < s.rows(); ++i) c += s.at(i, 0) > 0;
        return c;
    };
    EXPECT_EQ(from_other(mix_sets(real, other, 0.0, 2000, rng)), 0u);
    EXPECT_EQ(from_other(mix_sets(real, other, 1.0, 2000, rng)), 2000u);
    EXPECT_EQ(from_other(mix_sets(real, other, 0.5, 2000, rng)), 1000u);
    for (double t = 0; t <= 1.0; t += 0.05) {
        EXPECT_EQ(from_other(mix_sets(real, other, t, 999, rng)), mix_count(t, 999));
    }
}

TEST(MixSets, RoundHalfToEven) {
    EXPECT_EQ(mix_count(0.5, 5), 2u);  // 2.5 -> 2
    EXPECT_EQ(mix_count(0.5, 7), 4u);  // 3.5 -> 4
    EXPECT_ERROR_CODE(mix_count(1.5, 5), ErrorCode::validation);
}

TEST(MixSets, PoolTooSmall) {
    SeededRng rng(3);
    const auto a = normal_set(10, 1, rng);
    EXPECT_ERROR_CODE(mix_sets(a, a, 1.0, 20, rng), ErrorCode::insufficient_samples);
    EXPECT_ERROR_CODE(mix_sets(a, points({{1, 2}}), 0.5, 2, rng), ErrorCode::dimension);
}
