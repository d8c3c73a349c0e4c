#include <algorithm>
#include <initializer_list>
#include <string>
#include <string_view>

#include "genmetrics/cli.hpp"

namespace genmetrics::cli {

using nlohmann::json;

namespace {

void check_keys(const json& obj, std::initializer_list<std::string_view> allowed, std::string_view where) {
    if (!obj.is_object()) fail(ErrorCode::config, std::string(where) + " must be a JSON object");
    for (const auto& [key, value] : obj.items()) {
        if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
            fail(ErrorCode::config, "unknown key '" + key + "' in " + std::string(where));
        }
    }
}

template <typename T>
T get_or(const json& obj, const char* key, T fallback) {
    return obj.contains(key) ? obj.at(key).get<T>() : fallback;
}

std::size_t get_count(const json& obj, const char* key, std::size_t fallback) {
    if (!obj.contains(key)) return fallback;
    const auto& v = obj.at(key);
    if (!v.is_number_integer() || v.get<long long>() < 0) {
        fail(ErrorCode::config, std::string("'") + key + "' must be a non-negative integer");
    }
    return v.get<std::size_t>();
}

MixtureSpec parse_mixture(const json& doc) {
    if (doc.contains("means")) {
        check_keys(doc, {"kind", "means", "scales", "weights"}, "mixture source");
        MixtureSpec spec;
        spec.means = doc.at("means").get<std::vector<std::vector<double>>>();
        const std::size_t c = spec.means.size();
        spec.scales = get_or(doc, "scales", std::vector<double>(c, 1.0));
        spec.weights = get_or(doc, "weights", std::vector<double>(c, c ? 1.0 / static_cast<double>(c) : 0.0));
        spec.validate();
        return spec;
    }
    check_keys(doc, {"kind", "dim", "components", "spread", "scale", "offset", "structure_seed"},
               "mixture source");
    if (!doc.contains("dim")) fail(ErrorCode::config, "mixture source needs 'dim' or 'means'");
    return random_mixture(get_count(doc, "dim", 0), get_count(doc, "components", 1),
                          get_or(doc, "spread", 0.0), get_or(doc, "scale", 1.0), get_or(doc, "offset", 0.0),
                          get_or<std::uint64_t>(doc, "structure_seed", 0));
}

ToyFeatureMap parse_feature_map(const std::string& text) {
    if (text == "pixel") return ToyFeatureMap::pixel;
    if (text == "histogram") return ToyFeatureMap::histogram;
    fail(ErrorCode::config, "feature map must be 'pixel' or 'histogram', got '" + text + "'");
}

json source_json(const DataSource& src) {
    switch (src.kind) {
        case DataSource::Kind::mixture:
            return {{"kind", "mixture"},
                    {"means", src.mixture.means},
                    {"scales", src.mixture.scales},
                    {"weights", src.mixture.weights}};
        case DataSource::Kind::file: return {{"kind", "file"}, {"path", src.path.string()}};
        case DataSource::Kind::toy_images: return {{"kind", "toy_images"}};
        case DataSource::Kind::none: break;
    }
    return nullptr;
}

ExperimentRequest parse_request(const json& doc, const std::filesystem::path& base_dir) {
    check_keys(doc,
               {"protocol", "real", "other", "metrics", "grid", "seeds", "n", "k", "kmeans_max_iter", "kernel",
                "softmax", "images", "timing_repeats"},
               "config");
    ExperimentRequest req;
    SweepConfig& cfg = req.config;
    if (doc.contains("real")) cfg.real = parse_source(doc.at("real"), base_dir);
    if (doc.contains("other") && !doc.at("other").is_null()) cfg.other = parse_source(doc.at("other"), base_dir);
    cfg.metrics = get_or(doc, "metrics", std::vector<std::string>{});
    for (const auto& m : cfg.metrics) {
        if (!is_known_metric(m)) fail(ErrorCode::config, "unknown metric '" + m + "'");
    }
    cfg.grid = get_or(doc, "grid", std::vector<double>{});
    req.seeds = get_or(doc, "seeds", std::vector<std::uint64_t>{0, 1, 2, 3, 4});
    if (req.seeds.empty()) fail(ErrorCode::config, "'seeds' must not be empty");
    cfg.n = get_count(doc, "n", cfg.n);
    cfg.k = get_count(doc, "k", cfg.k);
    cfg.kmeans_max_iter = get_count(doc, "kmeans_max_iter", cfg.kmeans_max_iter);
    cfg.timing_repeats = get_count(doc, "timing_repeats", cfg.timing_repeats);

    if (doc.contains("kernel")) {
        const auto& k = doc.at("kernel");
        check_keys(k, {"bandwidth", "sigma"}, "kernel");
        const auto mode = get_or<std::string>(k, "bandwidth", k.contains("sigma") ? "fixed" : "median");
        if (mode == "median") {
            cfg.metric_options.kernel = KernelConfig::median();
        } else if (mode == "fixed") {
            const double sigma = get_or(k, "sigma", 0.0);
            if (!(sigma > 0.0)) fail(ErrorCode::config, "fixed kernel needs 'sigma' > 0");
            cfg.metric_options.kernel = KernelConfig::fixed(sigma);
        } else {
            fail(ErrorCode::config, "kernel bandwidth must be 'median' or 'fixed'");
        }
    }
    if (doc.contains("softmax")) {
        const auto& s = doc.at("softmax");
        check_keys(s, {"prototypes", "temperature"}, "softmax");
        cfg.metric_options.prototypes = get_or(s, "prototypes", std::vector<std::vector<double>>{});
        cfg.metric_options.temperature = get_or(s, "temperature", 0.0);
        if (cfg.metric_options.temperature < 0.0) fail(ErrorCode::config, "softmax temperature must be >= 0");
    }
    if (doc.contains("images")) {
        const auto& im = doc.at("images");
        check_keys(im, {"height", "width", "max_shift", "max_angle", "feature"}, "images");
        auto& s = cfg.images;
        s.height = get_count(im, "height", s.height);
        s.width = get_count(im, "width", s.width);
        s.max_shift = static_cast<int>(get_count(im, "max_shift", static_cast<std::size_t>(s.max_shift)));
        s.max_angle = get_or(im, "max_angle", s.max_angle);
        if (!(s.max_angle >= 0.0)) fail(ErrorCode::config, "max_angle must be >= 0");
        if (im.contains("feature")) s.map = parse_feature_map(im.at("feature").get<std::string>());
    }
    return req;
}

}  // namespace

DataSource parse_source(const json& doc, const std::filesystem::path& base_dir) {
    try {
        if (!doc.is_object() || !doc.contains("kind")) fail(ErrorCode::config, "data source needs a 'kind'");
        const auto kind = doc.at("kind").get<std::string>();
        DataSource src;
        if (kind == "mixture") {
            src.kind = DataSource::Kind::mixture;
            src.mixture = parse_mixture(doc);
        } else if (kind == "file") {
            check_keys(doc, {"kind", "path"}, "file source");
            src.kind = DataSource::Kind::file;
            std::filesystem::path path = doc.at("path").get<std::string>();
            src.path = path.is_absolute() ? path : base_dir / path;
            if (!std::filesystem::is_regular_file(src.path)) {
                fail(ErrorCode::io, "data file not found: " + src.path.string());
            }
        } else if (kind == "toy_images") {
            check_keys(doc, {"kind"}, "toy_images source");
            src.kind = DataSource::Kind::toy_images;
        } else {
            fail(ErrorCode::config, "unknown data source kind '" + kind + "'");
        }
        return src;
    } catch (const Error& e) {
        // Invalid mixture parameters are configuration mistakes here.
        if (e.code() == ErrorCode::validation) fail(ErrorCode::config, e.what());
        throw;
    } catch (const json::exception& e) {
        fail(ErrorCode::config, std::string("data source: ") + e.what());
    }
}

ExperimentRequest parse_experiment_config(const json& doc, const std::filesystem::path& base_dir) {
    try {
        return parse_request(doc, base_dir);
    } catch (const Error& e) {
        if (e.code() == ErrorCode::validation) fail(ErrorCode::config, e.what());
        throw;
    } catch (const json::exception& e) {
        fail(ErrorCode::config, std::string("config: ") + e.what());
    }
}

json describe_config(Protocol protocol, const ExperimentRequest& request, const std::vector<double>& grid) {
    const SweepConfig& cfg = request.config;
    json kernel = cfg.metric_options.kernel.bandwidth == KernelConfig::Bandwidth::median_heuristic
                      ? json{{"bandwidth", "median"}}
                      : json{{"bandwidth", "fixed"}, {"sigma", cfg.metric_options.kernel.sigma}};
    json doc = {
        {"protocol", std::string(to_string(protocol))},
        {"real", source_json(cfg.real)},
        {"other", source_json(cfg.other)},
        {"metrics", cfg.metrics},
        {"grid", grid},
        {"seeds", request.seeds},
        {"n", cfg.n},
        {"k", cfg.k},
        {"kmeans_max_iter", cfg.kmeans_max_iter},
        {"kernel", kernel},
        {"softmax",
         {{"prototypes", cfg.metric_options.prototypes}, {"temperature", cfg.metric_options.temperature}}},
        {"images",
         {{"height", cfg.images.height},
          {"width", cfg.images.width},
          {"max_shift", cfg.images.max_shift},
          {"max_angle", cfg.images.max_angle},
          {"feature", cfg.images.map == ToyFeatureMap::pixel ? "pixel" : "histogram"}}},
        {"timing_repeats", cfg.timing_repeats},
    };
    return doc;
}

}  // namespace genmetrics::cli
