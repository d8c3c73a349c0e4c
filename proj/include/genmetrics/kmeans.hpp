#pragma once

#include <cstddef>
#include <vector>

#include "genmetrics/featureset.hpp"
#include "genmetrics/rng.hpp"

namespace genmetrics {

struct KMeansResult {
    std::size_t k = 0;
    std::size_t dim = 0;
    std::vector<double> centroids;         // k x dim, row-major
    std::vector<std::size_t> assignment;   // cluster id per input row
    double inertia = 0.0;                  // sum of squared distances to assigned centroid
    std::vector<double> inertia_history;   // inertia after every assignment step
    std::size_t iterations = 0;
    bool converged = false;                // reached an assignment fixpoint

    std::span<const double> centroid(std::size_t c) const noexcept {
        return {centroids.data() + c * dim, dim};
    }
};

/// Lloyd's algorithm from a k-means++ seeding. Stops at an assignment fixpoint
/// or after max_iter assignment steps. Ties go to the lowest cluster id. A
/// cluster that loses all members is re-seeded with the point farthest from
/// its current centroid.
KMeansResult kmeans(const FeatureSet& set, std::size_t k, SeededRng& rng, std::size_t max_iter = 100);

}  // namespace genmetrics
