#include <algorithm>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include "genmetrics/error.hpp"
#include "genmetrics/transport.hpp"

namespace genmetrics {

// For equal-size uniform marginals the transport polytope is the Birkhoff
// polytope, whose vertices are permutation matrices, so the optimum is a
// matching.
double brute_force_emd(const FeatureSet& a, const FeatureSet& b) {
    if (a.rows() != b.rows()) {
        fail(ErrorCode::unsupported, "brute-force EMD needs equal set sizes");
    }
    if (a.rows() > kBruteForceMaxPoints) {
        fail(ErrorCode::unsupported, "brute-force EMD supports at most " +
                                         std::to_string(kBruteForceMaxPoints) + " points per side");
    }
    const auto dist = pairwise_distances(a, b);
    const std::size_t n = a.rows();
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    double best = std::numeric_limits<double>::infinity();
    do {
        double total = 0.0;
        for (std::size_t i = 0; i < n; ++i) total += dist(i, perm[i]);
        best = std::min(best, total);
    } while (std::next_permutation(perm.begin(), perm.end()));
    return best / static_cast<double>(n);
}

}  // namespace genmetrics
