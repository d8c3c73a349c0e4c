#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "genmetrics/featureset.hpp"

namespace genmetrics {

// ---------------------------------------------------------------------------
// Softmax-space scores
// ---------------------------------------------------------------------------

/// Probabilities are clamped to at least this value (then rows renormalized)
/// before any KL term is evaluated, so one-hot rows give finite scores.
inline constexpr double kProbabilityFloor = 1e-12;

/// exp(mean_i KL(p(y|x_i) || p(y))) with p(y) the column mean of gen.
/// Result lies in [1, K].
double inception_score(const FeatureSet& gen);

/// exp(mean_i KL(p(y|x_i) || p(y)) - KL(p(y) || p(y*))), p(y*) being the
/// column mean of the real softmax rows.
double mode_score(const FeatureSet& gen, const FeatureSet& real);

/// 1 - score / baseline. Used for both RIS (from IS) and RMS (from MS).
double relative_inverse_score(double score, double baseline_score);

// ---------------------------------------------------------------------------
// Kernel MMD
// ---------------------------------------------------------------------------

struct KernelConfig {
    enum class Bandwidth { fixed, median_heuristic };

    Bandwidth bandwidth = Bandwidth::median_heuristic;
    double sigma = 1.0;  // used when bandwidth == fixed; must be > 0

    static KernelConfig fixed(double sigma) { return {Bandwidth::fixed, sigma}; }
    static KernelConfig median() { return {Bandwidth::median_heuristic, 1.0}; }
};

/// Median Euclidean distance over all unordered pairs of distinct rows of the
/// pooled set a ∪ b. Falls back to 1.0 when that median is 0.
double median_heuristic_bandwidth(const FeatureSet& a, const FeatureSet& b);

/// Bandwidth the kernel config resolves to for this pair of sets.
double resolve_bandwidth(const KernelConfig& kernel, const FeatureSet& a, const FeatureSet& b);

/// Biased (V-statistic) MMD with a Gaussian kernel exp(-|x-y|^2 / (2 sigma^2)).
/// Diagonal kernel terms are included. Returns sqrt(max(0, MMD^2)).
double mmd(const FeatureSet& a, const FeatureSet& b, const KernelConfig& kernel = KernelConfig::median());

/// Mean of k(a_i, b_j) over all i, j. Rows are reduced in a fixed order.
double mean_gaussian_kernel(const FeatureSet& a, const FeatureSet& b, double sigma);

// ---------------------------------------------------------------------------
// Fréchet distance between Gaussian moment fits
// ---------------------------------------------------------------------------

struct GaussianFit {
    Eigen::VectorXd mean;
    Eigen::MatrixXd covariance;
};

/// Column mean and 1/(n-1)-normalized covariance. Needs n >= 2.
GaussianFit fit_gaussian(const FeatureSet& set);

/// Tr((A B)^{1/2}) for symmetric PSD A, B, computed through the symmetric form
/// A^{1/2} B A^{1/2}; negative eigenvalues from round-off are clamped to 0.
double trace_sqrt_product(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b);

/// |mu_a - mu_b|^2 + Tr(C_a + C_b - 2 (C_a C_b)^{1/2}), clamped at 0.
double frechet_distance(const GaussianFit& a, const GaussianFit& b);

inline constexpr double kCovarianceRidge = 1e-6;

/// FID between the moment fits of two sets. When d >= min(n, m) both
/// covariances get kCovarianceRidge added to their diagonal.
double fid(const FeatureSet& a, const FeatureSet& b);

// ---------------------------------------------------------------------------
// Reports
// ---------------------------------------------------------------------------

struct MetricReport {
    std::string metric_name;
    double score = 0.0;
    std::size_t n = 0;
    std::size_t m = 0;
    SpaceTag space = SpaceTag::feature;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> kernel;  // e.g. "gaussian/median"
    std::optional<double> bandwidth;
    double wall_time_ms = 0.0;
    std::vector<std::pair<std::string, double>> extras;  // e.g. real_acc, fake_acc
};

}  // namespace genmetrics
