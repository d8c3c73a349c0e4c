#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "genmetrics/error.hpp"
#include "genmetrics/metrics.hpp"
#include "genmetrics/parallel.hpp"

namespace genmetrics {

double median_heuristic_bandwidth(const FeatureSet& a, const FeatureSet& b) {
    require_same_dim(a, b, "median_heuristic_bandwidth");
    const std::size_t total = a.rows() + b.rows();
    const auto point = [&](std::size_t i) { return i < a.rows() ? a.row(i) : b.row(i - a.rows()); };

    // Row i owns the slots for pairs (i, j > i).
    const std::size_t pairs = total * (total - 1) / 2;
    if (pairs == 0) return 1.0;
    std::vector<double> dist(pairs);
    const auto row_offset = [total](std::size_t i) { return i * (2 * total - i - 1) / 2; };
    parallel_for(total, [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            double* slot = dist.data() + row_offset(i);
            const auto pi = point(i);
            for (std::size_t j = i + 1; j < total; ++j) *slot++ = std::sqrt(squared_distance(pi, point(j)));
        }
    });

    const auto mid = dist.begin() + static_cast<std::ptrdiff_t>(pairs / 2);
    std::nth_element(dist.begin(), mid, dist.end());
    double median = *mid;
    if (pairs % 2 == 0) {
        const double lower = *std::max_element(dist.begin(), mid);
        median = 0.5 * (lower + median);
    }
    return median > 0.0 ? median : 1.0;
}

double resolve_bandwidth(const KernelConfig& kernel, const FeatureSet& a, const FeatureSet& b) {
    if (kernel.bandwidth == KernelConfig::Bandwidth::median_heuristic) {
        return median_heuristic_bandwidth(a, b);
    }
    if (!(kernel.sigma > 0.0) || !std::isfinite(kernel.sigma)) {
        fail(ErrorCode::validation, "fixed kernel bandwidth must be a positive finite sigma");
    }
    return kernel.sigma;
}

double mean_gaussian_kernel(const FeatureSet& a, const FeatureSet& b, double sigma) {
    require_same_dim(a, b, "mean_gaussian_kernel");
    const double scale = -1.0 / (2.0 * sigma * sigma);
    std::vector<double> row_sums(a.rows(), 0.0);
    parallel_for(a.rows(), [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            const auto ai = a.row(i);
            double sum = 0.0;
            for (std::size_t j = 0; j < b.rows(); ++j) sum += std::exp(scale * squared_distance(ai, b.row(j)));
            row_sums[i] = sum;
        }
    });
    // Fixed left-to-right reduction over rows: identical for any worker count.
    const double total = std::accumulate(row_sums.begin(), row_sums.end(), 0.0);
    return total / (static_cast<double>(a.rows()) * static_cast<double>(b.rows()));
}

double mmd(const FeatureSet& a, const FeatureSet& b, const KernelConfig& kernel) {
    require_same_dim(a, b, "mmd");
    const double sigma = resolve_bandwidth(kernel, a, b);
    const double within_a = mean_gaussian_kernel(a, a, sigma);
    const double within_b = mean_gaussian_kernel(b, b, sigma);
    const double cross = mean_gaussian_kernel(a, b, sigma);
    const double squared = (within_a + within_b) - 2.0 * cross;
    return std::sqrt(std::max(0.0, squared));
}

}  // namespace genmetrics
