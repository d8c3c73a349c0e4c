#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "genmetrics/error.hpp"
#include "genmetrics/featureset.hpp"
#include "genmetrics/images.hpp"
#include "genmetrics/metrics.hpp"
#include "genmetrics/synthetic.hpp"

namespace genmetrics {

enum class Protocol { mixing, collapse, drop, transform, sample_efficiency, overfitting, timing };

std::string_view to_string(Protocol protocol) noexcept;
Protocol parse_protocol(std::string_view text);  // config error on unknown names

/// Where a protocol's samples come from.
struct DataSource {
    enum class Kind { none, mixture, file, toy_images };
    Kind kind = Kind::none;
    MixtureSpec mixture;          // kind == mixture
    std::filesystem::path path;   // kind == file (FSET or .csv)
};

struct ImageSettings {
    std::size_t height = 32;
    std::size_t width = 32;
    int max_shift = 4;
    double max_angle = 15.0;
    ToyFeatureMap map = ToyFeatureMap::histogram;
};

/// Metric names understood by the sweeps: is, ms, ris, rms, mmd, wd, fid,
/// nn (overall accuracy), nn_real, nn_fake.
std::span<const std::string_view> known_metrics() noexcept;
bool is_known_metric(std::string_view name) noexcept;

struct MetricOptions {
    KernelConfig kernel = KernelConfig::median();
    // Softmax stand-in classifier for is/ms/ris/rms on non-softmax data.
    std::vector<std::vector<double>> prototypes;
    double temperature = 0.0;  // 0: use the feature dimension
};

/// Scores gen against real for every requested metric. The relative scores
/// use real as the baseline (IS0 = IS(real), MS0 = MS(real, real)).
std::map<std::string, double> evaluate_metrics(std::span<const std::string> metrics, const FeatureSet& real,
                                               const FeatureSet& gen, const MetricOptions& options);

struct SweepConfig {
    DataSource real;
    DataSource other;  // S_g source for mixing / sample_efficiency / timing
    std::vector<std::string> metrics;
    std::vector<double> grid;  // empty: protocol default
    std::size_t n = 1000;
    std::size_t k = 20;
    std::size_t kmeans_max_iter = 100;
    MetricOptions metric_options;
    ImageSettings images;
    std::size_t timing_repeats = 3;
    bool keep_going = false;  // record per-seed failures instead of throwing
};

/// Default sweep grid of a protocol for the given config.
std::vector<double> default_grid(Protocol protocol, const SweepConfig& config);

struct Series {
    std::vector<double> mean;                 // per sweep value
    std::vector<double> stddev;               // sample std (n-1) over seeds, 0 for one seed
    std::vector<std::size_t> seed_count;      // seeds that contributed
    std::vector<std::vector<double>> per_seed;  // [value][seed], successful seeds in seed order
};

struct SeedFailure {
    std::uint64_t seed = 0;
    ErrorCode code = ErrorCode::validation;
    std::string message;
};

struct ExperimentCurve {
    Protocol protocol = Protocol::mixing;
    std::string sweep_variable;
    std::vector<double> values;
    std::map<std::string, Series> series;
    std::vector<std::uint64_t> seeds;
    SpaceTag space = SpaceTag::feature;
    std::vector<SeedFailure> failures;
};

/// Runs one protocol for every seed and aggregates per sweep value.
///
/// Series names are the metric names, except for sample_efficiency, which
/// records "<metric>/rr" (real vs real) and "<metric>/rg" (real vs other).
/// timing series hold wall-clock milliseconds, overfitting series hold the
/// validation minus training gap.
ExperimentCurve run_sweep(Protocol protocol, const SweepConfig& config, std::span<const std::uint64_t> seeds);

}  // namespace genmetrics
