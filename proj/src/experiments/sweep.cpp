#include "genmetrics/experiments.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <optional>
#include <string>
#include <utility>

#include "genmetrics/kmeans.hpp"
#include "genmetrics/nn_test.hpp"
#include "genmetrics/transport.hpp"

namespace genmetrics {

namespace {

constexpr std::array<std::string_view, 10> kMetricNames = {"is",  "ms",  "ris", "rms",     "mmd",
                                                           "wd",  "fid", "nn",  "nn_real", "nn_fake"};

constexpr std::array<std::pair<Protocol, std::string_view>, 7> kProtocolNames = {{
    {Protocol::mixing, "mixing"},
    {Protocol::collapse, "collapse"},
    {Protocol::drop, "drop"},
    {Protocol::transform, "transform"},
    {Protocol::sample_efficiency, "sample_efficiency"},
    {Protocol::overfitting, "overfitting"},
    {Protocol::timing, "timing"},
}};

// Stream ids for the per-seed generators.
constexpr std::uint64_t kRealStream = 1;
constexpr std::uint64_t kOtherStream = 2;
constexpr std::uint64_t kKMeansStream = 3;
constexpr std::uint64_t kOrderStream = 4;
constexpr std::uint64_t kValueStream = 100;

bool needs_softmax(std::string_view m) { return m == "is" || m == "ms" || m == "ris" || m == "rms"; }

std::string_view sweep_variable(Protocol p) {
    switch (p) {
        case Protocol::mixing: return "t";
        case Protocol::collapse: return "collapsed_clusters";
        case Protocol::drop: return "dropped_clusters";
        case Protocol::transform: return "transformed_fraction";
        case Protocol::sample_efficiency: return "n";
        case Protocol::overfitting: return "overlap_ratio";
        case Protocol::timing: return "n";
    }
    return "";
}

std::vector<double> linspace(double lo, double hi, std::size_t count) {
    std::vector<double> out(count);
    for (std::size_t i = 0; i < count; ++i) {
        out[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(count - 1);
    }
    return out;
}

std::vector<double> integer_grid(std::size_t hi, std::size_t count) {
    std::vector<double> out;
    for (const double v : linspace(0.0, static_cast<double>(hi), count)) {
        const double r = std::round(v);
        if (out.empty() || out.back() != r) out.push_back(r);
    }
    return out;
}

bool is_count(double v) { return v >= 0.0 && std::floor(v) == v && v < 1e15; }

class Source {
public:
    Source(const DataSource& spec, const ImageSettings& images) : spec_(spec), images_(images) {
        if (spec.kind == DataSource::Kind::file) loaded_.emplace(load_feature_file(spec.path));
    }

    bool present() const { return spec_.kind != DataSource::Kind::none; }

    SpaceTag space() const {
        switch (spec_.kind) {
            case DataSource::Kind::file: return loaded_->space();
            case DataSource::Kind::toy_images:
                return images_.map == ToyFeatureMap::pixel ? SpaceTag::pixel : SpaceTag::feature;
            default: return SpaceTag::feature;
        }
    }

    std::size_t dim() const {
        switch (spec_.kind) {
            case DataSource::Kind::file: return loaded_->cols();
            case DataSource::Kind::mixture: return spec_.mixture.dim();
            case DataSource::Kind::toy_images:
                return images_.map == ToyFeatureMap::pixel ? images_.height * images_.width : kHistogramBins;
            default: return 0;
        }
    }

    FeatureSet draw(std::size_t count, SeededRng rng) const {
        switch (spec_.kind) {
            case DataSource::Kind::mixture: return generate_gaussian_mixture(spec_.mixture, count, rng);
            case DataSource::Kind::file: {
                if (count > loaded_->rows()) {
                    fail(ErrorCode::insufficient_samples,
                         "file " + spec_.path.string() + " has " + std::to_string(loaded_->rows()) +
                             " rows, protocol needs " + std::to_string(count));
                }
                return loaded_->select(rng.sample_without_replacement(loaded_->rows(), count));
            }
            case DataSource::Kind::toy_images:
                return toy_feature_map(generate_toy_images(count, images_.height, images_.width, rng), images_.map);
            case DataSource::Kind::none: break;
        }
        fail(ErrorCode::config, "data source missing");
    }

    /// `parts` disjoint sets of `count` rows each.
    std::vector<FeatureSet> draw_disjoint(std::size_t count, std::size_t parts, SeededRng rng) const {
        const auto pool = draw(count * parts, rng.derive(0));
        SeededRng split_rng = rng.derive(1);
        return seeded_split(pool, std::vector<std::size_t>(parts, count), split_rng);
    }

private:
    const DataSource& spec_;
    const ImageSettings& images_;
    std::optional<FeatureSet> loaded_;
};

using ValueScores = std::map<std::string, double>;

struct Context {
    Protocol protocol;
    const SweepConfig& config;
    std::span<const double> grid;
    const Source& real;
    const Source& other;
    MetricOptions options;
};

ValueScores score(const Context& ctx, const FeatureSet& real, const FeatureSet& gen) {
    return evaluate_metrics(ctx.config.metrics, real, gen, ctx.options);
}

std::vector<ValueScores> run_mixing(const Context& ctx, const SeededRng& base) {
    const auto sets = ctx.real.draw_disjoint(ctx.config.n, 2, base.derive(kRealStream));
    const auto other_pool = ctx.other.draw(ctx.config.n, base.derive(kOtherStream));
    std::vector<ValueScores> out;
    for (std::size_t i = 0; i < ctx.grid.size(); ++i) {
        SeededRng rng = base.derive(kValueStream + i);
        const auto gen = mix_sets(sets[1], other_pool, ctx.grid[i], ctx.config.n, rng);
        out.push_back(score(ctx, sets[0], gen));
    }
    return out;
}

std::vector<ValueScores> run_clusters(const Context& ctx, const SeededRng& base) {
    const auto sets = ctx.real.draw_disjoint(ctx.config.n, 2, base.derive(kRealStream));
    const FeatureSet& target = sets[1];
    SeededRng km_rng = base.derive(kKMeansStream);
    const auto km = kmeans(target, ctx.config.k, km_rng, ctx.config.kmeans_max_iter);
    SeededRng order_rng = base.derive(kOrderStream);
    const auto order = cluster_order(ctx.config.k, order_rng);

    std::vector<ValueScores> out;
    for (std::size_t i = 0; i < ctx.grid.size(); ++i) {
        const auto chosen = std::span(order).first(static_cast<std::size_t>(ctx.grid[i]));
        if (ctx.protocol == Protocol::collapse) {
            out.push_back(score(ctx, sets[0], collapse_clusters(target, km.assignment, km, chosen)));
        } else {
            SeededRng rng = base.derive(kValueStream + i);
            out.push_back(score(ctx, sets[0], drop_clusters(target, km.assignment, km.k, chosen, rng)));
        }
    }
    return out;
}

std::vector<ValueScores> run_transform(const Context& ctx, const SeededRng& base) {
    const auto& img = ctx.config.images;
    const std::size_t n = ctx.config.n;
    SeededRng rng = base.derive(kRealStream);
    const auto images = generate_toy_images(2 * n, img.height, img.width, rng);
    const std::span<const ToyImage> all(images);
    const auto reference = toy_feature_map(all.first(n), img.map);
    const auto candidates = all.subspan(n);

    std::vector<ValueScores> out;
    for (std::size_t i = 0; i < ctx.grid.size(); ++i) {
        SeededRng value_rng = base.derive(kValueStream + i);
        const auto moved = transform_images(candidates, img.max_shift, img.max_angle, ctx.grid[i], value_rng);
        out.push_back(score(ctx, reference, toy_feature_map(moved, img.map)));
    }
    return out;
}

std::vector<ValueScores> run_sample_efficiency(const Context& ctx, const SeededRng& base) {
    std::vector<ValueScores> out;
    for (std::size_t i = 0; i < ctx.grid.size(); ++i) {
        const auto n = static_cast<std::size_t>(ctx.grid[i]);
        const SeededRng rng = base.derive(kValueStream + i);
        const auto sets = ctx.real.draw_disjoint(n, 2, rng.derive(kRealStream));
        const auto gen = ctx.other.draw(n, rng.derive(kOtherStream));
        ValueScores scores;
        for (const auto& [name, v] : score(ctx, sets[0], sets[1])) scores[name + "/rr"] = v;
        for (const auto& [name, v] : score(ctx, sets[0], gen)) scores[name + "/rg"] = v;
        out.push_back(std::move(scores));
    }
    return out;
}

std::vector<ValueScores> run_overfitting(const Context& ctx, const SeededRng& base) {
    const std::size_t n = ctx.config.n;
    // Training set, validation set and a held-out pool standing in for novel samples.
    const auto sets = ctx.real.draw_disjoint(n, 3, base.derive(kRealStream));
    const FeatureSet& train = sets[0];
    const FeatureSet& val = sets[1];
    const FeatureSet& holdout = sets[2];
    // One fixed order per pool: raising the ratio swaps held-out rows for
    // training rows, so the overlaps are nested across the grid.
    SeededRng order_rng = base.derive(kOrderStream);
    const auto train_order = order_rng.permutation(n);
    const auto holdout_order = order_rng.permutation(n);

    std::vector<ValueScores> out;
    for (std::size_t i = 0; i < ctx.grid.size(); ++i) {
        const std::size_t m = mix_count(ctx.grid[i], n);
        std::optional<FeatureSet> gen;
        if (m > 0) gen.emplace(train.select(std::span(train_order).first(m)));
        if (m < n) {
            auto rest = holdout.select(std::span(holdout_order).first(n - m));
            gen.emplace(gen ? concat(*gen, rest) : std::move(rest));
        }
        const auto on_val = score(ctx, val, *gen);
        const auto on_train = score(ctx, train, *gen);
        ValueScores gap;
        for (const auto& [name, v] : on_val) gap[name] = v - on_train.at(name);
        out.push_back(std::move(gap));
    }
    return out;
}

std::vector<ValueScores> run_timing(const Context& ctx, const SeededRng& base) {
    const Source& gen_source = ctx.other.present() ? ctx.other : ctx.real;
    std::vector<ValueScores> out;
    for (std::size_t i = 0; i < ctx.grid.size(); ++i) {
        const auto n = static_cast<std::size_t>(ctx.grid[i]);
        const SeededRng rng = base.derive(kValueStream + i);
        const auto real = ctx.real.draw(n, rng.derive(kRealStream));
        const auto gen = gen_source.draw(n, rng.derive(kOtherStream));
        ValueScores times;
        for (const auto& metric : ctx.config.metrics) {
            const std::vector<std::string> one{metric};
            std::vector<double> ms;
            for (std::size_t r = 0; r < ctx.config.timing_repeats; ++r) {
                const auto start = std::chrono::steady_clock::now();
                evaluate_metrics(one, real, gen, ctx.options);
                const auto stop = std::chrono::steady_clock::now();
                ms.push_back(std::chrono::duration<double, std::milli>(stop - start).count());
            }
            std::sort(ms.begin(), ms.end());
            const std::size_t mid = ms.size() / 2;
            times[metric] = ms.size() % 2 ? ms[mid] : 0.5 * (ms[mid - 1] + ms[mid]);
        }
        out.push_back(std::move(times));
    }
    return out;
}

void validate(Protocol protocol, const SweepConfig& config, std::span<const double> grid,
              std::span<const std::uint64_t> seeds) {
    if (seeds.empty()) fail(ErrorCode::config, "sweep needs at least one seed");
    if (config.metrics.empty()) fail(ErrorCode::config, "sweep needs at least one metric");
    for (const auto& m : config.metrics) {
        if (!is_known_metric(m)) fail(ErrorCode::config, "unknown metric '" + m + "'");
    }
    if (grid.empty()) fail(ErrorCode::config, "sweep grid is empty");
    if (config.real.kind == DataSource::Kind::none) fail(ErrorCode::config, "sweep needs a real data source");
    const bool needs_other = protocol == Protocol::mixing || protocol == Protocol::sample_efficiency;
    if (needs_other && config.other.kind == DataSource::Kind::none) {
        fail(ErrorCode::config, std::string(to_string(protocol)) + " needs an 'other' data source");
    }
    if (protocol == Protocol::transform && config.real.kind != DataSource::Kind::toy_images) {
        fail(ErrorCode::config, "transform protocol needs toy_images as the real source");
    }
    if (config.n < 2 && protocol != Protocol::sample_efficiency && protocol != Protocol::timing) {
        fail(ErrorCode::config, "n must be >= 2");
    }
    if (protocol == Protocol::timing && config.timing_repeats == 0) {
        fail(ErrorCode::config, "timing_repeats must be >= 1");
    }
    for (const double v : grid) {
        switch (protocol) {
            case Protocol::mixing:
            case Protocol::transform:
            case Protocol::overfitting:
                if (!(v >= 0.0 && v <= 1.0)) fail(ErrorCode::config, "grid values must lie in [0, 1]");
                break;
            case Protocol::collapse:
                if (!is_count(v) || v > static_cast<double>(config.k)) {
                    fail(ErrorCode::config, "collapse grid needs integers in [0, k]");
                }
                break;
            case Protocol::drop:
                if (!is_count(v) || v >= static_cast<double>(config.k)) {
                    fail(ErrorCode::config, "drop grid needs integers in [0, k)");
                }
                break;
            case Protocol::sample_efficiency:
            case Protocol::timing:
                if (!is_count(v) || v < 2.0) fail(ErrorCode::config, "sample-size grid needs integers >= 2");
                break;
        }
    }
}

Series aggregate(const std::vector<std::vector<double>>& per_value) {
    Series s;
    s.per_seed = per_value;
    for (const auto& seeds : per_value) {
        const std::size_t count = seeds.size();
        double mean = 0.0;
        for (const double v : seeds) mean += v;
        mean = count ? mean / static_cast<double>(count) : std::nan("");
        double ss = 0.0;
        for (const double v : seeds) ss += (v - mean) * (v - mean);
        const double sd = count > 1 ? std::sqrt(ss / static_cast<double>(count - 1)) : (count ? 0.0 : std::nan(""));
        s.mean.push_back(mean);
        s.stddev.push_back(sd);
        s.seed_count.push_back(count);
    }
    return s;
}

}  // namespace

std::string_view to_string(Protocol protocol) noexcept {
    for (const auto& [p, name] : kProtocolNames) {
        if (p == protocol) return name;
    }
    return "unknown";
}

Protocol parse_protocol(std::string_view text) {
    for (const auto& [p, name] : kProtocolNames) {
        if (name == text) return p;
    }
    fail(ErrorCode::config, "unknown protocol '" + std::string(text) + "'");
}

std::span<const std::string_view> known_metrics() noexcept { return kMetricNames; }

bool is_known_metric(std::string_view name) noexcept {
    return std::find(kMetricNames.begin(), kMetricNames.end(), name) != kMetricNames.end();
}

std::map<std::string, double> evaluate_metrics(std::span<const std::string> metrics, const FeatureSet& real,
                                               const FeatureSet& gen, const MetricOptions& options) {
    std::optional<FeatureSet> real_p;
    std::optional<FeatureSet> gen_p;
    const auto project = [&](const FeatureSet& s) {
        if (s.space() == SpaceTag::softmax) return s;
        if (options.prototypes.empty()) {
            fail(ErrorCode::config, "softmax metrics need softmax inputs or projection prototypes");
        }
        const double t = options.temperature > 0.0 ? options.temperature : static_cast<double>(s.cols());
        return softmax_projection(s, options.prototypes, t);
    };
    const auto softmax_pair = [&] {
        if (!real_p) real_p.emplace(project(real));
        if (!gen_p) gen_p.emplace(project(gen));
    };
    std::optional<NnAccuracy> nn;

    std::map<std::string, double> out;
    for (const auto& m : metrics) {
        if (!is_known_metric(m)) fail(ErrorCode::config, "unknown metric '" + m + "'");
        if (needs_softmax(m)) softmax_pair();
        if (m == "is") {
            out[m] = inception_score(*gen_p);
        } else if (m == "ms") {
            out[m] = mode_score(*gen_p, *real_p);
        } else if (m == "ris") {
            out[m] = relative_inverse_score(inception_score(*gen_p), inception_score(*real_p));
        } else if (m == "rms") {
            out[m] = relative_inverse_score(mode_score(*gen_p, *real_p), mode_score(*real_p, *real_p));
        } else if (m == "mmd") {
            out[m] = mmd(real, gen, options.kernel);
        } else if (m == "wd") {
            out[m] = emd(real, gen).score;
        } else if (m == "fid") {
            out[m] = fid(real, gen);
        } else {
            if (!nn) nn = one_nn_accuracy(real, gen);
            out[m] = m == "nn" ? nn->overall : m == "nn_real" ? nn->real_acc : nn->fake_acc;
        }
    }
    return out;
}

std::vector<double> default_grid(Protocol protocol, const SweepConfig& config) {
    switch (protocol) {
        case Protocol::mixing:
        case Protocol::transform: return linspace(0.0, 1.0, 11);
        case Protocol::overfitting: return linspace(0.0, 1.0, 5);
        case Protocol::collapse: return integer_grid(config.k, 11);
        case Protocol::drop: return integer_grid(config.k == 0 ? 0 : config.k - 1, 11);
        case Protocol::sample_efficiency: return {50, 100, 200, 500, 1000};
        case Protocol::timing: return {100, 200, 500, 1000, 2000};
    }
    return {};
}

ExperimentCurve run_sweep(Protocol protocol, const SweepConfig& config, std::span<const std::uint64_t> seeds) {
    const auto grid = config.grid.empty() ? default_grid(protocol, config) : config.grid;
    validate(protocol, config, grid, seeds);

    const Source real(config.real, config.images);
    const Source other(config.other, config.images);
    Context ctx{protocol, config, grid, real, other, config.metric_options};
    if (ctx.options.prototypes.empty() && config.real.kind == DataSource::Kind::mixture) {
        ctx.options.prototypes = config.real.mixture.means;
    }

    ExperimentCurve curve;
    curve.protocol = protocol;
    curve.sweep_variable = sweep_variable(protocol);
    curve.values = grid;
    curve.seeds.assign(seeds.begin(), seeds.end());
    curve.space = real.space();

    // series name -> [value][successful seed]
    std::map<std::string, std::vector<std::vector<double>>> raw;
    for (const auto seed : seeds) {
        const SeededRng base(seed);
        std::vector<ValueScores> per_value;
        try {
            switch (protocol) {
                case Protocol::mixing: per_value = run_mixing(ctx, base); break;
                case Protocol::collapse:
                case Protocol::drop: per_value = run_clusters(ctx, base); break;
                case Protocol::transform: per_value = run_transform(ctx, base); break;
                case Protocol::sample_efficiency: per_value = run_sample_efficiency(ctx, base); break;
                case Protocol::overfitting: per_value = run_overfitting(ctx, base); break;
                case Protocol::timing: per_value = run_timing(ctx, base); break;
            }
        } catch (const Error& e) {
            if (!config.keep_going || e.code() == ErrorCode::config) throw;
            curve.failures.push_back({seed, e.code(), e.what()});
            continue;
        }
        for (std::size_t i = 0; i < per_value.size(); ++i) {
            for (const auto& [name, v] : per_value[i]) {
                auto& slot = raw[name];
                slot.resize(grid.size());
                slot[i].push_back(v);
            }
        }
    }
    if (raw.empty()) {
        // Every seed failed: keep the requested series with empty samples.
        for (const auto& m : config.metrics) {
            if (protocol == Protocol::sample_efficiency) {
                raw[m + "/rr"].resize(grid.size());
                raw[m + "/rg"].resize(grid.size());
            } else {
                raw[m].resize(grid.size());
            }
        }
    }
    for (const auto& [name, per_value] : raw) curve.series[name] = aggregate(per_value);
    return curve;
}

}  // namespace genmetrics
