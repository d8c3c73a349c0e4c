#include "genmetrics/kmeans.hpp"

#include <algorithm>
#include <limits>
#include <string>

#include "genmetrics/error.hpp"
#include "genmetrics/parallel.hpp"

namespace genmetrics {

namespace {

std::vector<double> plus_plus_seeding(const FeatureSet& set, std::size_t k, SeededRng& rng) {
    const std::size_t n = set.rows();
    const std::size_t d = set.cols();
    std::vector<double> centroids;
    centroids.reserve(k * d);
    const auto take = [&](std::size_t i) {
        const auto r = set.row(i);
        centroids.insert(centroids.end(), r.begin(), r.end());
    };

    take(static_cast<std::size_t>(rng.below(n)));
    std::vector<double> nearest(n, std::numeric_limits<double>::infinity());
    for (std::size_t c = 1; c < k; ++c) {
        const std::span<const double> last(centroids.data() + (c - 1) * d, d);
        double total = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            nearest[i] = std::min(nearest[i], squared_distance(set.row(i), last));
            total += nearest[i];
        }
        if (total <= 0.0) {
            take(static_cast<std::size_t>(rng.below(n)));
            continue;
        }
        const double target = rng.uniform01() * total;
        double running = 0.0;
        std::size_t pick = n - 1;
        for (std::size_t i = 0; i < n; ++i) {
            running += nearest[i];
            if (running > target && nearest[i] > 0.0) {
                pick = i;
                break;
            }
        }
        take(pick);
    }
    return centroids;
}

// Assigns every point to its closest centroid; returns whether anything moved.
bool assign(const FeatureSet& set, KMeansResult& km, std::vector<double>& dist2) {
    const std::size_t n = set.rows();
    std::vector<char> moved(n, 0);
    parallel_for(n, [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            std::size_t best = 0;
            double best_d = std::numeric_limits<double>::infinity();
            for (std::size_t c = 0; c < km.k; ++c) {
                const double dd = squared_distance(set.row(i), km.centroid(c));
                if (dd < best_d) {
                    best_d = dd;
                    best = c;
                }
            }
            moved[i] = km.assignment[i] != best;
            km.assignment[i] = best;
            dist2[i] = best_d;
        }
    });
    double inertia = 0.0;
    for (const double v : dist2) inertia += v;
    km.inertia = inertia;
    km.inertia_history.push_back(inertia);
    return std::any_of(moved.begin(), moved.end(), [](char m) { return m != 0; });
}

void update(const FeatureSet& set, KMeansResult& km, std::vector<double>& dist2) {
    const std::size_t n = set.rows();
    const std::size_t d = set.cols();
    std::vector<std::size_t> counts(km.k, 0);
    for (const auto c : km.assignment) ++counts[c];

    // Re-seed empty clusters with the point farthest from its own centroid.
    for (std::size_t c = 0; c < km.k; ++c) {
        if (counts[c] != 0) continue;
        std::size_t far = n;
        for (std::size_t i = 0; i < n; ++i) {
            if (counts[km.assignment[i]] <= 1) continue;
            if (far == n || dist2[i] > dist2[far]) far = i;
        }
        if (far == n) fail(ErrorCode::validation, "k-means cannot fill an empty cluster");
        --counts[km.assignment[far]];
        km.assignment[far] = c;
        counts[c] = 1;
        dist2[far] = 0.0;
    }

    std::fill(km.centroids.begin(), km.centroids.end(), 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        double* centroid = km.centroids.data() + km.assignment[i] * d;
        const auto r = set.row(i);
        for (std::size_t j = 0; j < d; ++j) centroid[j] += r[j];
    }
    for (std::size_t c = 0; c < km.k; ++c) {
        for (std::size_t j = 0; j < d; ++j) km.centroids[c * d + j] /= static_cast<double>(counts[c]);
    }
}

}  // namespace

KMeansResult kmeans(const FeatureSet& set, std::size_t k, SeededRng& rng, std::size_t max_iter) {
    if (k == 0 || k > set.rows()) {
        fail(ErrorCode::validation, "k-means needs 1 <= k <= n (k=" + std::to_string(k) +
                                        ", n=" + std::to_string(set.rows()) + ")");
    }
    KMeansResult km;
    km.k = k;
    km.dim = set.cols();
    km.centroids = plus_plus_seeding(set, k, rng);
    km.assignment.assign(set.rows(), k);  // sentinel: nothing assigned yet
    std::vector<double> dist2(set.rows(), 0.0);

    assign(set, km, dist2);
    for (std::size_t iter = 0; iter < max_iter; ++iter) {
        update(set, km, dist2);
        ++km.iterations;
        if (!assign(set, km, dist2)) {
            km.converged = true;
            break;
        }
    }
    return km;
}

}  // namespace genmetrics
