#include "genmetrics/featureset.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include "genmetrics/error.hpp"
#include "genmetrics/parallel.hpp"

namespace genmetrics {

std::string_view to_string(SpaceTag tag) noexcept {
    switch (tag) {
        case SpaceTag::pixel: return "pixel";
        case SpaceTag::feature: return "feature";
        case SpaceTag::softmax: return "softmax";
    }
    return "feature";
}

SpaceTag parse_space_tag(std::string_view text) {
    if (text == "pixel") return SpaceTag::pixel;
    if (text == "feature") return SpaceTag::feature;
    if (text == "softmax") return SpaceTag::softmax;
    fail(ErrorCode::config, "unknown space tag '" + std::string(text) + "'");
}

FeatureSet::FeatureSet(std::vector<double> data, std::size_t rows, std::size_t cols, SpaceTag tag,
                       std::string name)
    : data_(std::move(data)), rows_(rows), cols_(cols), tag_(tag), name_(std::move(name)) {
    if (rows_ == 0 || cols_ == 0) {
        fail(ErrorCode::validation, "feature set needs n >= 1 and d >= 1");
    }
    if (data_.size() != rows_ * cols_) {
        fail(ErrorCode::validation, "feature set payload has " + std::to_string(data_.size()) +
                                        " values, expected n*d = " + std::to_string(rows_ * cols_));
    }
    for (std::size_t i = 0; i < data_.size(); ++i) {
        if (!std::isfinite(data_[i])) {
            fail(ErrorCode::validation, "non-finite value at row " + std::to_string(i / cols_) +
                                            ", column " + std::to_string(i % cols_));
        }
    }
    if (tag_ == SpaceTag::softmax) {
        for (std::size_t i = 0; i < rows_; ++i) {
            double sum = 0.0;
            for (const double p : row(i)) {
                if (p < 0.0) {
                    fail(ErrorCode::validation,
                         "softmax row " + std::to_string(i) + " has a negative probability");
                }
                sum += p;
            }
            if (std::abs(sum - 1.0) > kSoftmaxRowTolerance) {
                fail(ErrorCode::validation, "softmax row " + std::to_string(i) + " sums to " +
                                                std::to_string(sum) + ", not 1");
            }
        }
    }
}

FeatureSet FeatureSet::select(std::span<const std::size_t> indices) const {
    std::vector<double> out;
    out.reserve(indices.size() * cols_);
    for (const auto i : indices) {
        if (i >= rows_) fail(ErrorCode::validation, "row index out of range");
        const auto r = row(i);
        out.insert(out.end(), r.begin(), r.end());
    }
    return FeatureSet(std::move(out), indices.size(), cols_, tag_, name_);
}

FeatureSet FeatureSet::retagged(SpaceTag tag) const {
    return FeatureSet(data_, rows_, cols_, tag, name_);
}

FeatureSet concat(const FeatureSet& top, const FeatureSet& bottom) {
    require_same_dim(top, bottom, "concat");
    if (top.space() != bottom.space()) {
        fail(ErrorCode::validation, "cannot concatenate sets from different spaces");
    }
    std::vector<double> data(top.values().begin(), top.values().end());
    data.insert(data.end(), bottom.values().begin(), bottom.values().end());
    return FeatureSet(std::move(data), top.rows() + bottom.rows(), top.cols(), top.space(),
                      top.name());
}

void require_same_dim(const FeatureSet& a, const FeatureSet& b, std::string_view what) {
    if (a.cols() != b.cols()) {
        fail(ErrorCode::dimension, std::string(what) + ": dimension mismatch (" +
                                       std::to_string(a.cols()) + " vs " + std::to_string(b.cols()) +
                                       ")");
    }
}

DistanceMatrix pairwise_distances(const FeatureSet& a, const FeatureSet& b) {
    require_same_dim(a, b, "pairwise_distances");
    DistanceMatrix out(a.rows(), b.rows());
    parallel_for(a.rows(), [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            const auto ai = a.row(i);
            for (std::size_t j = 0; j < b.rows(); ++j) {
                out(i, j) = std::sqrt(squared_distance(ai, b.row(j)));
            }
        }
    });
    return out;
}

std::vector<std::vector<std::size_t>> split_indices(std::size_t n, std::span<const std::size_t> sizes,
                                                    SeededRng& rng) {
    const std::size_t total = std::accumulate(sizes.begin(), sizes.end(), std::size_t{0});
    if (total > n) {
        fail(ErrorCode::insufficient_samples, "split requests " + std::to_string(total) +
                                                  " rows from a set of " + std::to_string(n));
    }
    const auto picked = rng.sample_without_replacement(n, total);
    std::vector<std::vector<std::size_t>> parts;
    parts.reserve(sizes.size());
    std::size_t offset = 0;
    for (const auto size : sizes) {
        parts.emplace_back(picked.begin() + static_cast<std::ptrdiff_t>(offset),
                           picked.begin() + static_cast<std::ptrdiff_t>(offset + size));
        offset += size;
    }
    return parts;
}

std::vector<FeatureSet> seeded_split(const FeatureSet& set, std::span<const std::size_t> sizes,
                                     SeededRng& rng) {
    std::vector<FeatureSet> out;
    for (const auto& idx : split_indices(set.rows(), sizes, rng)) {
        out.push_back(set.select(idx));
    }
    return out;
}

std::size_t mix_count(double t, std::size_t n_out) {
    if (!(t >= 0.0 && t <= 1.0)) fail(ErrorCode::validation, "mix fraction must lie in [0, 1]");
    // nearbyint honours the default round-to-nearest-even mode.
    return static_cast<std::size_t>(std::nearbyint(t * static_cast<double>(n_out)));
}

FeatureSet mix_sets(const FeatureSet& real, const FeatureSet& other, double t, std::size_t n_out,
                    SeededRng& rng) {
    require_same_dim(real, other, "mix_sets");
    const std::size_t from_other = mix_count(t, n_out);
    const std::size_t from_real = n_out - from_other;
    if (from_other > other.rows() || from_real > real.rows()) {
        fail(ErrorCode::insufficient_samples,
             "mix needs " + std::to_string(from_real) + " real and " + std::to_string(from_other) +
                 " other rows, pools hold " + std::to_string(real.rows()) + " and " +
                 std::to_string(other.rows()));
    }
    const auto real_idx = rng.sample_without_replacement(real.rows(), from_real);
    const auto other_idx = rng.sample_without_replacement(other.rows(), from_other);

    std::vector<double> rows;
    rows.reserve(n_out * real.cols());
    for (const auto i : real_idx) rows.insert(rows.end(), real.row(i).begin(), real.row(i).end());
    for (const auto i : other_idx) rows.insert(rows.end(), other.row(i).begin(), other.row(i).end());

    const auto order = rng.permutation(n_out);
    std::vector<double> shuffled(rows.size());
    const std::size_t d = real.cols();
    for (std::size_t r = 0; r < n_out; ++r) {
        std::copy_n(rows.begin() + static_cast<std::ptrdiff_t>(order[r] * d), d,
                    shuffled.begin() + static_cast<std::ptrdiff_t>(r * d));
    }
    return FeatureSet(std::move(shuffled), n_out, d, real.space(), real.name());
}

}  // namespace genmetrics
