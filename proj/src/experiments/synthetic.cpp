#include "genmetrics/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "genmetrics/error.hpp"

namespace genmetrics {

void MixtureSpec::validate() const {
    if (means.empty()) fail(ErrorCode::validation, "mixture needs at least one component");
    if (scales.size() != means.size() || weights.size() != means.size()) {
        fail(ErrorCode::validation, "mixture means, scales and weights must have the same length");
    }
    const std::size_t d = means.front().size();
    if (d == 0) fail(ErrorCode::validation, "mixture dimension must be >= 1");
    double total = 0.0;
    for (std::size_t c = 0; c < means.size(); ++c) {
        if (means[c].size() != d) fail(ErrorCode::validation, "mixture means differ in dimension");
        if (!(scales[c] > 0.0) || !std::isfinite(scales[c])) {
            fail(ErrorCode::validation, "mixture scales must be positive");
        }
        if (!(weights[c] >= 0.0)) fail(ErrorCode::validation, "mixture weights must be >= 0");
        total += weights[c];
    }
    if (std::abs(total - 1.0) > 1e-9) {
        fail(ErrorCode::validation, "mixture weights sum to " + std::to_string(total) + ", not 1");
    }
}

MixtureSpec random_mixture(std::size_t dim, std::size_t components, double spread, double scale,
                           double offset, std::uint64_t structure_seed) {
    if (dim == 0 || components == 0) fail(ErrorCode::validation, "mixture needs dim >= 1 and components >= 1");
    if (!(spread >= 0.0) || !std::isfinite(spread) || !std::isfinite(offset)) {
        fail(ErrorCode::validation, "mixture spread must be finite and >= 0");
    }
    SeededRng rng(structure_seed);
    MixtureSpec spec;
    for (std::size_t c = 0; c < components; ++c) {
        std::vector<double> mean(dim);
        for (auto& v : mean) v = offset + spread * rng.normal();
        spec.means.push_back(std::move(mean));
    }
    spec.scales.assign(components, scale);
    spec.weights.assign(components, 1.0 / static_cast<double>(components));
    spec.validate();
    return spec;
}

FeatureSet generate_gaussian_mixture(const MixtureSpec& spec, std::size_t n, SeededRng& rng) {
    return generate_gaussian_mixture(spec, n, rng, nullptr);
}

FeatureSet generate_gaussian_mixture(const MixtureSpec& spec, std::size_t n, SeededRng& rng,
                                     std::vector<std::size_t>* components) {
    spec.validate();
    const std::size_t d = spec.dim();
    const std::size_t k = spec.means.size();
    std::vector<double> cumulative(k);
    double running = 0.0;
    for (std::size_t c = 0; c < k; ++c) cumulative[c] = running += spec.weights[c];

    std::vector<double> data(n * d);
    if (components) components->assign(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
        const double u = rng.uniform01() * running;
        std::size_t c = 0;
        while (c + 1 < k && cumulative[c] <= u) ++c;
        if (components) (*components)[i] = c;
        for (std::size_t j = 0; j < d; ++j) {
            data[i * d + j] = spec.means[c][j] + spec.scales[c] * rng.normal();
        }
    }
    return FeatureSet(std::move(data), n, d, SpaceTag::feature, "gaussian-mixture");
}

FeatureSet softmax_projection(const FeatureSet& set, std::span<const std::vector<double>> prototypes,
                              double temperature) {
    if (prototypes.empty()) fail(ErrorCode::validation, "softmax projection needs prototypes");
    if (!(temperature > 0.0)) fail(ErrorCode::validation, "softmax temperature must be positive");
    const std::size_t k = prototypes.size();
    for (const auto& p : prototypes) {
        if (p.size() != set.cols()) fail(ErrorCode::dimension, "prototype dimension mismatch");
    }
    std::vector<double> out(set.rows() * k);
    for (std::size_t i = 0; i < set.rows(); ++i) {
        double* row = out.data() + i * k;
        double top = -std::numeric_limits<double>::infinity();
        for (std::size_t c = 0; c < k; ++c) {
            row[c] = -squared_distance(set.row(i), prototypes[c]) / temperature;
            top = std::max(top, row[c]);
        }
        double sum = 0.0;
        for (std::size_t c = 0; c < k; ++c) sum += row[c] = std::exp(row[c] - top);
        for (std::size_t c = 0; c < k; ++c) row[c] /= sum;
    }
    return FeatureSet(std::move(out), set.rows(), k, SpaceTag::softmax, set.name());
}

namespace {

std::vector<char> selection_mask(std::size_t k, std::span<const std::size_t> clusters) {
    std::vector<char> selected(k, 0);
    for (const auto c : clusters) {
        if (c >= k) fail(ErrorCode::validation, "cluster id out of range");
        selected[c] = 1;
    }
    return selected;
}

void check_assignment(const FeatureSet& set, std::span<const std::size_t> assignment) {
    if (assignment.size() != set.rows()) {
        fail(ErrorCode::validation, "cluster assignment length must equal the row count");
    }
}

}  // namespace

FeatureSet collapse_clusters(const FeatureSet& set, std::span<const std::size_t> assignment,
                             const KMeansResult& km, std::span<const std::size_t> clusters) {
    check_assignment(set, assignment);
    if (km.dim != set.cols()) fail(ErrorCode::dimension, "centroid dimension mismatch");
    const auto selected = selection_mask(km.k, clusters);
    std::vector<double> data(set.values().begin(), set.values().end());
    const std::size_t d = set.cols();
    for (std::size_t i = 0; i < set.rows(); ++i) {
        const auto c = assignment[i];
        if (c >= km.k) fail(ErrorCode::validation, "cluster id out of range");
        if (!selected[c]) continue;
        const auto centroid = km.centroid(c);
        std::copy(centroid.begin(), centroid.end(), data.begin() + static_cast<std::ptrdiff_t>(i * d));
    }
    return FeatureSet(std::move(data), set.rows(), d, set.space(), set.name());
}

FeatureSet drop_clusters(const FeatureSet& set, std::span<const std::size_t> assignment, std::size_t k,
                         std::span<const std::size_t> clusters, SeededRng& rng) {
    check_assignment(set, assignment);
    const auto selected = selection_mask(k, clusters);
    std::vector<std::size_t> survivors;
    for (std::size_t i = 0; i < set.rows(); ++i) {
        if (assignment[i] >= k) fail(ErrorCode::validation, "cluster id out of range");
        if (!selected[assignment[i]]) survivors.push_back(i);
    }
    std::vector<std::size_t> rows(set.rows());
    for (std::size_t i = 0; i < set.rows(); ++i) {
        if (!selected[assignment[i]]) {
            rows[i] = i;
            continue;
        }
        if (survivors.empty()) {
            fail(ErrorCode::insufficient_samples, "no rows left in surviving clusters to refill from");
        }
        rows[i] = survivors[static_cast<std::size_t>(rng.below(survivors.size()))];
    }
    return set.select(rows);
}

std::vector<std::size_t> cluster_order(std::size_t k, SeededRng& rng) { return rng.permutation(k); }

FeatureSet simulate_mode_collapse(const FeatureSet& set, std::size_t k, std::size_t c, SeededRng& rng,
                                  std::size_t max_iter) {
    if (c > k) fail(ErrorCode::validation, "cannot collapse more clusters than k");
    const auto km = kmeans(set, k, rng, max_iter);
    const auto order = cluster_order(k, rng);
    return collapse_clusters(set, km.assignment, km, std::span(order).first(c));
}

FeatureSet simulate_mode_drop(const FeatureSet& set, std::size_t k, std::size_t c, SeededRng& rng,
                              std::size_t max_iter) {
    if (c >= k) fail(ErrorCode::validation, "cannot drop every cluster (need c < k)");
    const auto km = kmeans(set, k, rng, max_iter);
    const auto order = cluster_order(k, rng);
    return drop_clusters(set, km.assignment, k, std::span(order).first(c), rng);
}

}  // namespace genmetrics
