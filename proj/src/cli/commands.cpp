#include <chrono>
#include <fstream>
#include <iterator>
#include <locale>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "genmetrics/cli.hpp"
#include "genmetrics/images.hpp"
#include "genmetrics/metrics.hpp"
#include "genmetrics/nn_test.hpp"
#include "genmetrics/transport.hpp"

namespace genmetrics::cli {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Streams {
    std::ostream& out;
    std::ostream& err;

    void log(const std::string& msg) const { err << "genmetrics: " << msg << '\n'; }
    void status(const json& line) const { out << line.dump() << '\n'; }
};

std::string read_text(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorCode::io, "cannot open " + path.string());
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorCode::io, "cannot write " + path.string());
    out << text;
    out.close();
    if (!out) fail(ErrorCode::io, "write failed for " + path.string());
}

json parse_json_text(const std::string& text, const std::string& what, ErrorCode code) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        fail(code, what + " is not valid JSON: " + e.what());
    }
}

// --params takes inline JSON or a path to a JSON file.
json load_params(const std::string& params) {
    const auto first = params.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && params[first] == '{') {
        return parse_json_text(params, "--params", ErrorCode::config);
    }
    return parse_json_text(read_text(params), params, ErrorCode::format);
}

// ---------------------------------------------------------------------------
// compute
// ---------------------------------------------------------------------------

struct ComputeArgs {
    std::string metric;
    std::string real;
    std::string gen;
    std::optional<double> sigma;
    bool median = false;
    std::string out;
    std::string format = "json";
    bool with_timing = false;
};

MetricReport compute_report(const ComputeArgs& a) {
    const auto gen = load_feature_file(a.gen);
    std::optional<FeatureSet> real;
    if (!a.real.empty()) real.emplace(load_feature_file(a.real));
    if (!real && a.metric != "is") fail(ErrorCode::config, "--real is required for metric " + a.metric);

    MetricReport r;
    r.metric_name = a.metric;
    r.n = real ? real->rows() : 0;
    r.m = gen.rows();
    r.space = gen.space();
    const auto start = std::chrono::steady_clock::now();
    if (a.metric == "is") {
        r.score = inception_score(gen);
    } else if (a.metric == "ms") {
        r.score = mode_score(gen, *real);
    } else if (a.metric == "ris") {
        r.score = relative_inverse_score(inception_score(gen), inception_score(*real));
    } else if (a.metric == "rms") {
        r.score = relative_inverse_score(mode_score(gen, *real), mode_score(*real, *real));
    } else if (a.metric == "mmd") {
        const auto kernel = a.sigma ? KernelConfig::fixed(*a.sigma) : KernelConfig::median();
        const double bw = resolve_bandwidth(kernel, *real, gen);
        r.score = mmd(*real, gen, KernelConfig::fixed(bw));
        r.kernel = a.sigma ? "gaussian/fixed" : "gaussian/median";
        r.bandwidth = bw;
    } else if (a.metric == "wd") {
        r.score = emd(*real, gen).score;
    } else if (a.metric == "fid") {
        r.score = fid(*real, gen);
    } else {
        const auto acc = one_nn_accuracy(*real, gen);
        r.score = acc.overall;
        r.extras = {{"real_acc", acc.real_acc}, {"fake_acc", acc.fake_acc}};
    }
    r.wall_time_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    return r;
}

json report_json(const MetricReport& r, bool with_timing) {
    json j = {{"metric", r.metric_name}, {"score", json_number(r.score)}, {"n", r.n}, {"m", r.m},
              {"space", std::string(to_string(r.space))}};
    if (r.seed) j["seed"] = *r.seed;
    if (r.kernel) j["kernel"] = *r.kernel;
    if (r.bandwidth) j["bandwidth"] = json_number(*r.bandwidth);
    for (const auto& [k, v] : r.extras) j[k] = json_number(v);
    if (with_timing) j["wall_time_ms"] = json_number(r.wall_time_ms);
    return j;
}

std::string report_csv(const MetricReport& r, bool with_timing) {
    std::string head = "metric,score,n,m,space,kernel,bandwidth";
    std::string row = r.metric_name + ',' + format_number(r.score) + ',' + std::to_string(r.n) + ',' +
                      std::to_string(r.m) + ',' + std::string(to_string(r.space)) + ',' + r.kernel.value_or("") +
                      ',' + (r.bandwidth ? format_number(*r.bandwidth) : std::string());
    for (const auto& [k, v] : r.extras) {
        head += ',' + k;
        row += ',' + format_number(v);
    }
    if (with_timing) {
        head += ",wall_time_ms";
        row += ',' + format_number(r.wall_time_ms);
    }
    return head + '\n' + row + '\n';
}

int cmd_compute(const ComputeArgs& a, const Streams& io) {
    const auto report = compute_report(a);
    const auto rj = report_json(report, a.with_timing);
    if (!a.out.empty()) {
        write_text(a.out, a.format == "csv" ? report_csv(report, a.with_timing) : rj.dump(2) + '\n');
        io.log("wrote " + a.out);
    }
    io.status({{"status", "ok"},
               {"command", "compute"},
               {"output", a.out.empty() ? json(nullptr) : json(a.out)},
               {"report", rj}});
    return kExitOk;
}

// ---------------------------------------------------------------------------
// experiment / bench
// ---------------------------------------------------------------------------

std::size_t data_rows(const ExperimentCurve& curve) {
    std::size_t rows = 0;
    for (const auto& [name, s] : curve.series) rows += s.mean.size();
    return rows;
}

json failures_json(const ExperimentCurve& curve) {
    json list = json::array();
    for (const auto& f : curve.failures) {
        list.push_back({{"seed", f.seed}, {"error", std::string(to_string(f.code))}, {"message", f.message}});
    }
    return list;
}

struct ExperimentArgs {
    std::string protocol;
    std::string config;
    std::string out;
};

int cmd_experiment(const ExperimentArgs& a, const Streams& io) {
    const auto protocol = parse_protocol(a.protocol);
    const fs::path config_path = a.config;
    const auto doc = parse_json_text(read_text(config_path), config_path.string(), ErrorCode::format);
    auto request = parse_experiment_config(doc, config_path.parent_path());
    if (doc.contains("protocol") && doc.at("protocol") != a.protocol) {
        fail(ErrorCode::config, "config names protocol " + doc.at("protocol").dump() + " but --protocol is " +
                                    a.protocol);
    }
    request.config.keep_going = true;
    const auto grid = request.config.grid.empty() ? default_grid(protocol, request.config) : request.config.grid;

    io.log("running " + a.protocol + " over " + std::to_string(grid.size()) + " values and " +
           std::to_string(request.seeds.size()) + " seeds");
    const auto curve = run_sweep(protocol, request.config, request.seeds);
    for (const auto& f : curve.failures) io.log("seed " + std::to_string(f.seed) + " failed: " + f.message);

    const fs::path dir = a.out;
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) fail(ErrorCode::io, "cannot create " + dir.string() + ": " + ec.message());
    const bool partial = !curve.failures.empty();
    const std::string stem(to_string(protocol));
    const fs::path csv = dir / (stem + (partial ? ".csv.partial" : ".csv"));
    fs::remove(dir / (stem + (partial ? ".csv" : ".csv.partial")), ec);
    const fs::path sidecar = dir / (stem + ".config.json");

    auto described = describe_config(protocol, request, grid);
    if (partial) described["failures"] = failures_json(curve);
    write_text(csv, curve_to_csv(curve));
    write_text(sidecar, described.dump(2) + '\n');

    io.status({{"status", partial ? "partial" : "ok"},
               {"command", "experiment"},
               {"protocol", stem},
               {"csv", csv.string()},
               {"config", sidecar.string()},
               {"rows", data_rows(curve)},
               {"failures", failures_json(curve)}});
    return partial ? kExitPartial : kExitOk;
}

struct BenchArgs {
    std::vector<std::string> metrics;
    std::vector<std::size_t> sizes;
    std::size_t dim = 16;
    std::vector<std::uint64_t> seeds{0};
    std::size_t repeats = 3;
    double offset = 0.5;
    std::string out;
};

int cmd_bench(const BenchArgs& a, const Streams& io) {
    if (a.dim == 0) fail(ErrorCode::config, "--dim must be >= 1");
    SweepConfig cfg;
    cfg.real.kind = DataSource::Kind::mixture;
    cfg.real.mixture = random_mixture(a.dim, 1, 0.0, 1.0, 0.0, 0);
    cfg.other.kind = DataSource::Kind::mixture;
    cfg.other.mixture = random_mixture(a.dim, 1, 0.0, 1.0, a.offset, 0);
    cfg.metrics = a.metrics;
    cfg.grid.assign(a.sizes.begin(), a.sizes.end());
    cfg.timing_repeats = a.repeats;

    const auto curve = run_sweep(Protocol::timing, cfg, a.seeds);
    const auto csv = curve_to_csv(curve);
    if (a.out.empty()) {
        io.out << csv;
    } else {
        write_text(a.out, csv);
        io.log("wrote " + a.out);
    }
    io.status({{"status", "ok"},
               {"command", "bench"},
               {"output", a.out.empty() ? json(nullptr) : json(a.out)},
               {"rows", data_rows(curve)}});
    return kExitOk;
}

// ---------------------------------------------------------------------------
// gen
// ---------------------------------------------------------------------------

struct GenArgs {
    std::string kind;
    std::string params = "{}";
    std::size_t n = 0;
    std::uint64_t seed = 0;
    std::string out;
    std::string feature = "pixel";
};

int cmd_gen(const GenArgs& a, const Streams& io) {
    if (a.n == 0) fail(ErrorCode::config, "--n must be >= 1");
    json params = load_params(a.params);
    if (!params.is_object()) fail(ErrorCode::config, "--params must be a JSON object");
    SeededRng rng(a.seed);

    std::optional<FeatureSet> set;
    if (a.kind == "gaussian-mixture") {
        params["kind"] = "mixture";
        const auto src = parse_source(params, fs::current_path());
        set.emplace(generate_gaussian_mixture(src.mixture, a.n, rng));
    } else {
        std::size_t h = 32;
        std::size_t w = 32;
        try {
            for (const auto& [key, value] : params.items()) {
                if (key != "height" && key != "width") fail(ErrorCode::config, "unknown key '" + key + "' in --params");
            }
            h = params.value("height", h);
            w = params.value("width", w);
        } catch (const json::exception& e) {
            fail(ErrorCode::config, std::string("--params: ") + e.what());
        }
        if (h < kToyMinSide || w < kToyMinSide) {
            fail(ErrorCode::config, "toy images need height and width >= " + std::to_string(kToyMinSide));
        }
        const auto images = generate_toy_images(a.n, h, w, rng);
        set.emplace(toy_feature_map(images, a.feature == "pixel" ? ToyFeatureMap::pixel : ToyFeatureMap::histogram));
    }
    write_feature_file(*set, a.out);
    io.log("wrote " + a.out);
    io.status({{"status", "ok"},
               {"command", "gen"},
               {"output", a.out},
               {"n", set->rows()},
               {"d", set->cols()},
               {"space", std::string(to_string(set->space()))}});
    return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    const Streams io{out, err};

    CLI::App app{"Sample-based evaluation metrics for generative models"};
    app.name("genmetrics");
    app.require_subcommand(1);

    ComputeArgs compute;
    auto* c = app.add_subcommand("compute", "Score one generated set against one real set");
    c->add_option("--metric", compute.metric, "Metric")
        ->required()
        ->check(CLI::IsMember({"is", "ms", "ris", "rms", "mmd", "wd", "fid", "nn"}));
    c->add_option("--real", compute.real, "Real feature file (FSET or .csv)");
    c->add_option("--gen", compute.gen, "Generated feature file (FSET or .csv)")->required();
    auto* sigma = c->add_option("--sigma", compute.sigma, "Fixed Gaussian kernel bandwidth")
                      ->check(CLI::PositiveNumber);
    c->add_flag("--median", compute.median, "Median-heuristic bandwidth (default)")->excludes(sigma);
    c->add_option("--out", compute.out, "Report file");
    c->add_option("--format", compute.format, "Report format")->check(CLI::IsMember({"json", "csv"}));
    c->add_flag("--with-timing", compute.with_timing, "Include wall_time_ms in the report");

    ExperimentArgs experiment;
    auto* e = app.add_subcommand("experiment", "Run a sweep protocol from a JSON config");
    e->add_option("--protocol", experiment.protocol, "Protocol name")->required();
    e->add_option("--config", experiment.config, "JSON config file")->required();
    e->add_option("--out", experiment.out, "Output directory")->required();

    BenchArgs bench;
    auto* b = app.add_subcommand("bench", "Wall-clock timing of metrics against sample size");
    b->add_option("--metrics", bench.metrics, "Metrics")->required()->delimiter(',');
    b->add_option("--sizes", bench.sizes, "Sample sizes")->required()->delimiter(',');
    b->add_option("--dim", bench.dim, "Feature dimension");
    b->add_option("--seeds", bench.seeds, "Seeds")->delimiter(',');
    b->add_option("--repeats", bench.repeats, "Timing repetitions (median is kept)");
    b->add_option("--offset", bench.offset, "Mean offset of the generated distribution");
    b->add_option("--out", bench.out, "CSV output file (stdout if omitted)");

    GenArgs gen;
    auto* g = app.add_subcommand("gen", "Generate a synthetic FSET file");
    g->add_option("--kind", gen.kind, "Generator")
        ->required()
        ->check(CLI::IsMember({"gaussian-mixture", "toy-images"}));
    g->add_option("--params", gen.params, "Generator parameters: inline JSON or a JSON file");
    g->add_option("--n", gen.n, "Number of samples")->required();
    g->add_option("--seed", gen.seed, "Seed");
    g->add_option("--out", gen.out, "Output FSET file")->required();
    g->add_option("--feature", gen.feature, "Toy image feature map")->check(CLI::IsMember({"pixel", "histogram"}));

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp& ex) {
        return app.exit(ex, out, err);
    } catch (const CLI::ParseError& ex) {
        err << "genmetrics: usage error: " << ex.what() << '\n';
        return kExitUsage;
    }
    if (gen.kind != "toy-images" && g->count("--feature") > 0) {
        err << "genmetrics: usage error: --feature applies to toy-images only\n";
        return kExitUsage;
    }

    try {
        if (*c) return cmd_compute(compute, io);
        if (*e) return cmd_experiment(experiment, io);
        if (*b) return cmd_bench(bench, io);
        return cmd_gen(gen, io);
    } catch (const Error& ex) {
        io.log(std::string(to_string(ex.code())) + ": " + ex.what());
        io.status({{"status", "error"}, {"error", std::string(to_string(ex.code()))}, {"message", ex.what()}});
        return exit_code_for(ex.code());
    }
}

}  // namespace genmetrics::cli
