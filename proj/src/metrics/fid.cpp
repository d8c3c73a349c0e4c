#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Eigenvalues>

#include "genmetrics/error.hpp"
#include "genmetrics/metrics.hpp"

namespace genmetrics {

namespace {

Eigen::MatrixXd symmetric_sqrt(const Eigen::MatrixXd& m) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(m);
    if (eig.info() != Eigen::Success) fail(ErrorCode::solver_failure, "eigendecomposition failed");
    const Eigen::VectorXd roots = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    return eig.eigenvectors() * roots.asDiagonal() * eig.eigenvectors().transpose();
}

}  // namespace

GaussianFit fit_gaussian(const FeatureSet& set) {
    const auto n = set.rows();
    const auto d = set.cols();
    if (n < 2) fail(ErrorCode::insufficient_samples, "a covariance fit needs at least 2 points");
    const Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> x(
        set.values().data(), static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
    GaussianFit fit;
    fit.mean = x.colwise().mean().transpose();
    const Eigen::MatrixXd centered = x.rowwise() - fit.mean.transpose();
    fit.covariance = (centered.transpose() * centered) / static_cast<double>(n - 1);
    // Exact symmetry; the product above is symmetric only up to round-off.
    fit.covariance = 0.5 * (fit.covariance + fit.covariance.transpose()).eval();
    return fit;
}

double trace_sqrt_product(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
    const Eigen::MatrixXd root_a = symmetric_sqrt(a);
    Eigen::MatrixXd inner = root_a * b * root_a;
    inner = 0.5 * (inner + inner.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(inner, Eigen::EigenvaluesOnly);
    if (eig.info() != Eigen::Success) fail(ErrorCode::solver_failure, "eigendecomposition failed");
    return eig.eigenvalues().cwiseMax(0.0).cwiseSqrt().sum();
}

double frechet_distance(const GaussianFit& a, const GaussianFit& b) {
    if (a.mean.size() != b.mean.size()) {
        fail(ErrorCode::dimension, "Gaussian fits have different dimensions");
    }
    const double mean_term = (a.mean - b.mean).squaredNorm();
    const double trace_term = a.covariance.trace() + b.covariance.trace() -
                              2.0 * trace_sqrt_product(a.covariance, b.covariance);
    return std::max(0.0, mean_term + trace_term);
}

double fid(const FeatureSet& a, const FeatureSet& b) {
    require_same_dim(a, b, "fid");
    auto fit_a = fit_gaussian(a);
    auto fit_b = fit_gaussian(b);
    if (a.cols() >= std::min(a.rows(), b.rows())) {
        fit_a.covariance.diagonal().array() += kCovarianceRidge;
        fit_b.covariance.diagonal().array() += kCovarianceRidge;
    }
    return frechet_distance(fit_a, fit_b);
}

}  // namespace genmetrics
