#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "genmetrics/error.hpp"
#include "genmetrics/experiments.hpp"

namespace genmetrics::cli {

// Process exit statuses.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitFile = 3;
inline constexpr int kExitPrecondition = 4;
inline constexpr int kExitPartial = 5;

int exit_code_for(ErrorCode code) noexcept;

/// Entry point shared by the executable and the tests. args excludes the
/// program name. The final JSON status line goes to `out`, logs to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Shortest text that keeps 9 significant digits; "nan"/"inf"/"-inf" for
/// non-finite values. Locale-independent.
std::string format_number(double value);

/// value rounded to 9 significant digits, as a JSON number (null if not finite).
nlohmann::json json_number(double value);

struct ExperimentRequest {
    SweepConfig config;
    std::vector<std::uint64_t> seeds;
};

/// Relative file paths in the document resolve against base_dir.
DataSource parse_source(const nlohmann::json& doc, const std::filesystem::path& base_dir);
ExperimentRequest parse_experiment_config(const nlohmann::json& doc, const std::filesystem::path& base_dir);

/// Fully resolved config (defaults filled in, mixtures expanded).
nlohmann::json describe_config(Protocol protocol, const ExperimentRequest& request,
                               const std::vector<double>& grid);

/// sweep_value,metric,mean,std,seed_count,space rows sorted by (metric, sweep_value).
std::string curve_to_csv(const ExperimentCurve& curve);

}  // namespace genmetrics::cli
