#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "genmetrics/error.hpp"
#include "genmetrics/metrics.hpp"

namespace genmetrics {

namespace {

void require_softmax(const FeatureSet& set, const char* role) {
    if (set.space() != SpaceTag::softmax) {
        fail(ErrorCode::validation, std::string(role) + " set must be in softmax space, got " +
                                        std::string(to_string(set.space())));
    }
}

// Rows clamped to kProbabilityFloor and renormalized.
std::vector<double> clamped_rows(const FeatureSet& set) {
    const std::size_t k = set.cols();
    std::vector<double> out(set.values().begin(), set.values().end());
    for (std::size_t i = 0; i < set.rows(); ++i) {
        double* row = out.data() + i * k;
        double sum = 0.0;
        for (std::size_t j = 0; j < k; ++j) {
            row[j] = std::max(row[j], kProbabilityFloor);
            sum += row[j];
        }
        for (std::size_t j = 0; j < k; ++j) row[j] /= sum;
    }
    return out;
}

std::vector<double> column_mean(const std::vector<double>& rows, std::size_t n, std::size_t k) {
    std::vector<double> mean(k, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < k; ++j) mean[j] += rows[i * k + j];
    }
    for (auto& v : mean) v /= static_cast<double>(n);
    return mean;
}

double kl_divergence(const double* p, const double* q, std::size_t k) {
    double kl = 0.0;
    for (std::size_t j = 0; j < k; ++j) kl += p[j] * std::log(p[j] / q[j]);
    return kl;
}

// Mean over rows of KL(row || marginal), plus the marginal itself.
double mean_conditional_kl(const FeatureSet& gen, std::vector<double>* marginal_out) {
    const std::size_t n = gen.rows();
    const std::size_t k = gen.cols();
    const auto rows = clamped_rows(gen);
    auto marginal = column_mean(rows, n, k);
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) total += kl_divergence(rows.data() + i * k, marginal.data(), k);
    if (marginal_out) *marginal_out = std::move(marginal);
    // KL >= 0; identical rows can round to -1e-17 otherwise.
    return std::max(0.0, total / static_cast<double>(n));
}

}  // namespace

double inception_score(const FeatureSet& gen) {
    require_softmax(gen, "generated");
    return std::exp(mean_conditional_kl(gen, nullptr));
}

double mode_score(const FeatureSet& gen, const FeatureSet& real) {
    require_softmax(gen, "generated");
    require_softmax(real, "real");
    if (gen.cols() != real.cols()) {
        fail(ErrorCode::dimension, "mode score needs the same class count K (" +
                                       std::to_string(gen.cols()) + " vs " +
                                       std::to_string(real.cols()) + ")");
    }
    std::vector<double> gen_marginal;
    const double conditional = mean_conditional_kl(gen, &gen_marginal);
    const auto real_rows = clamped_rows(real);
    const auto real_marginal = column_mean(real_rows, real.rows(), real.cols());
    const double marginal_gap = kl_divergence(gen_marginal.data(), real_marginal.data(), gen.cols());
    return std::exp(conditional - marginal_gap);
}

double relative_inverse_score(double score, double baseline_score) {
    if (!(baseline_score > 0.0)) {
        fail(ErrorCode::domain, "relative inverse score needs a positive baseline");
    }
    return 1.0 - score / baseline_score;
}

}  // namespace genmetrics
