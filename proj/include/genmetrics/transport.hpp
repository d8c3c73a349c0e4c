#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "genmetrics/featureset.hpp"

namespace genmetrics {

/// Coupling between two discrete distributions: weights(i, j) >= 0 with row
/// sums equal to row_marginals and column sums equal to col_marginals.
struct TransportPlan {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> weights;  // row-major rows x cols
    std::vector<double> row_marginals;
    std::vector<double> col_marginals;

    double operator()(std::size_t i, std::size_t j) const noexcept { return weights[i * cols + j]; }
};

struct EmdResult {
    double score = 0.0;
    TransportPlan plan;
    std::size_t pivots = 0;
    std::size_t degenerate_pivots = 0;
};

struct EmdOptions {
    /// Hard cap on simplex pivots; exceeding it raises a solver failure rather
    /// than returning a suboptimal cost. 0 means an automatic cap.
    std::size_t max_pivots = 0;
    /// Consecutive degenerate pivots after which pricing switches to Bland's
    /// rule (first eligible arc) until progress resumes. 0 means automatic.
    std::size_t bland_threshold = 0;
};

/// Minimum-cost transport on an explicit cost matrix (rows x cols, row-major)
/// via network simplex on the bipartite transportation graph.
///
/// With uniform marginals the supplies are scaled to integers internally
/// (row i ships `cols` units, column j receives `rows` units) so every pivot is
/// exact; general weights are handled in floating point.
EmdResult solve_transport(std::span<const double> cost, std::size_t rows, std::size_t cols,
                          std::optional<std::span<const double>> row_weights = std::nullopt,
                          std::optional<std::span<const double>> col_weights = std::nullopt,
                          const EmdOptions& options = {});

/// Earth mover's distance between two point sets under Euclidean base
/// distance. Weights default to uniform and must each sum to 1 within 1e-8.
EmdResult emd(const FeatureSet& a, const FeatureSet& b,
              std::optional<std::span<const double>> a_weights = std::nullopt,
              std::optional<std::span<const double>> b_weights = std::nullopt,
              const EmdOptions& options = {});

/// Exact EMD for n == m <= 9 uniform points by enumerating all n! matchings.
/// Validation oracle for emd().
double brute_force_emd(const FeatureSet& a, const FeatureSet& b);

inline constexpr std::size_t kBruteForceMaxPoints = 9;

}  // namespace genmetrics
