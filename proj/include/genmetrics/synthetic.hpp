#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "genmetrics/featureset.hpp"
#include "genmetrics/kmeans.hpp"
#include "genmetrics/rng.hpp"

namespace genmetrics {

/// Isotropic Gaussian mixture.
struct MixtureSpec {
    std::vector<std::vector<double>> means;
    std::vector<double> scales;   // per-component standard deviation, > 0
    std::vector<double> weights;  // sums to 1 within 1e-9

    std::size_t dim() const { return means.empty() ? 0 : means.front().size(); }
    void validate() const;
};

/// Equal-weight mixture whose component means are offset + spread * N(0, I),
/// drawn from structure_seed; every component has standard deviation `scale`.
MixtureSpec random_mixture(std::size_t dim, std::size_t components, double spread, double scale,
                           double offset, std::uint64_t structure_seed);

/// n i.i.d. draws: component by weight, then mean + scale * N(0, I).
FeatureSet generate_gaussian_mixture(const MixtureSpec& spec, std::size_t n, SeededRng& rng);

/// As above, also reporting the component drawn for each row.
FeatureSet generate_gaussian_mixture(const MixtureSpec& spec, std::size_t n, SeededRng& rng,
                                     std::vector<std::size_t>* components);

/// Softmax over negative squared distances to prototype points:
/// p(y = c | x) ∝ exp(-|x - p_c|^2 / temperature). A fixed stand-in classifier
/// that maps any feature set into softmax space.
FeatureSet softmax_projection(const FeatureSet& set, std::span<const std::vector<double>> prototypes,
                              double temperature);

// ---------------------------------------------------------------------------
// Mode collapse / mode dropping
// ---------------------------------------------------------------------------

/// Replaces every row whose cluster is in `clusters` by that cluster's
/// centroid. Row count and order are preserved.
FeatureSet collapse_clusters(const FeatureSet& set, std::span<const std::size_t> assignment,
                             const KMeansResult& km, std::span<const std::size_t> clusters);

/// Replaces every row whose cluster is in `clusters` by a row drawn (with
/// replacement) from the rows of the surviving clusters.
FeatureSet drop_clusters(const FeatureSet& set, std::span<const std::size_t> assignment,
                         std::size_t k, std::span<const std::size_t> clusters, SeededRng& rng);

/// Seeded shuffle of cluster ids; prefixes of it give nested selections.
std::vector<std::size_t> cluster_order(std::size_t k, SeededRng& rng);

/// k-means on the set itself, then collapse the first c clusters of a seeded order.
FeatureSet simulate_mode_collapse(const FeatureSet& set, std::size_t k, std::size_t c, SeededRng& rng,
                                  std::size_t max_iter = 100);

/// k-means on the set itself, then drop the first c clusters of a seeded order.
FeatureSet simulate_mode_drop(const FeatureSet& set, std::size_t k, std::size_t c, SeededRng& rng,
                              std::size_t max_iter = 100);

}  // namespace genmetrics
