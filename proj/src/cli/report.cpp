#include <algorithm>
#include <charconv>
#include <cmath>
#include <locale>
#include <numeric>
#include <sstream>
#include <string>
#include <system_error>

#include "genmetrics/cli.hpp"

namespace genmetrics::cli {

int exit_code_for(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::config: return kExitUsage;
        case ErrorCode::format:
        case ErrorCode::truncation:
        case ErrorCode::io: return kExitFile;
        case ErrorCode::validation:
        case ErrorCode::dimension:
        case ErrorCode::insufficient_samples:
        case ErrorCode::domain:
        case ErrorCode::solver_failure:
        case ErrorCode::unsupported: return kExitPrecondition;
    }
    return kExitPrecondition;
}

std::string format_number(double value) {
    if (std::isnan(value)) return "nan";
    if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, value, std::chars_format::general, 9);
    return std::string(buf, res.ptr);
}

nlohmann::json json_number(double value) {
    if (!std::isfinite(value)) return nullptr;
    const auto text = format_number(value);
    double rounded = 0.0;
    std::from_chars(text.data(), text.data() + text.size(), rounded);
    return rounded;
}

std::string curve_to_csv(const ExperimentCurve& curve) {
    std::ostringstream out;
    out.imbue(std::locale::classic());
    out << "sweep_value,metric,mean,std,seed_count,space\n";
    std::vector<std::size_t> order(curve.values.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return curve.values[a] < curve.values[b]; });
    const auto space = to_string(curve.space);
    for (const auto& [metric, s] : curve.series) {
        for (const auto i : order) {
            out << format_number(curve.values[i]) << ',' << metric << ',' << format_number(s.mean[i]) << ','
                << format_number(s.stddev[i]) << ',' << s.seed_count[i] << ',' << space << '\n';
        }
    }
    return out.str();
}

}  // namespace genmetrics::cli
