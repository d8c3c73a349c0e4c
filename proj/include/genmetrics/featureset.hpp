#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "genmetrics/rng.hpp"

namespace genmetrics {

enum class SpaceTag : std::uint8_t { pixel = 0, feature = 1, softmax = 2 };

std::string_view to_string(SpaceTag tag) noexcept;
SpaceTag parse_space_tag(std::string_view text);

/// n points in a d-dimensional space, stored row-major in 64-bit precision.
///
/// Construction validates the invariants: n >= 1, d >= 1, every value finite,
/// and for softmax sets every row non-negative and summing to 1 within 1e-5.
/// A FeatureSet therefore never exists in an invalid state.
class FeatureSet {
public:
    static constexpr double kSoftmaxRowTolerance = 1e-5;

    FeatureSet(std::vector<double> data, std::size_t rows, std::size_t cols,
               SpaceTag tag = SpaceTag::feature, std::string name = {});

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    SpaceTag space() const noexcept { return tag_; }
    const std::string& name() const noexcept { return name_; }
    void set_name(std::string name) { name_ = std::move(name); }

    std::span<const double> row(std::size_t i) const noexcept {
        return {data_.data() + i * cols_, cols_};
    }
    double at(std::size_t i, std::size_t j) const noexcept { return data_[i * cols_ + j]; }
    std::span<const double> values() const noexcept { return data_; }

    /// Rows picked by index, in the given order (indices may repeat).
    FeatureSet select(std::span<const std::size_t> indices) const;

    /// Same data under a different space tag (re-validated).
    FeatureSet retagged(SpaceTag tag) const;

    friend bool operator==(const FeatureSet& a, const FeatureSet& b) {
        return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.tag_ == b.tag_ && a.data_ == b.data_;
    }

private:
    std::vector<double> data_;
    std::size_t rows_;
    std::size_t cols_;
    SpaceTag tag_;
    std::string name_;
};

/// Row-wise concatenation; both sets must share d and space tag.
FeatureSet concat(const FeatureSet& top, const FeatureSet& bottom);

class DistanceMatrix {
public:
    DistanceMatrix(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), values_(rows * cols, 0.0) {}

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    double operator()(std::size_t i, std::size_t j) const noexcept { return values_[i * cols_ + j]; }
    double& operator()(std::size_t i, std::size_t j) noexcept { return values_[i * cols_ + j]; }
    std::span<const double> values() const noexcept { return values_; }

private:
    std::size_t rows_;
    std::size_t cols_;
    std::vector<double> values_;
};

/// Sum of squared coordinate differences, accumulated in double in index order.
inline double squared_distance(std::span<const double> a, std::span<const double> b) noexcept {
    double sum = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        const double diff = a[k] - b[k];
        sum += diff * diff;
    }
    return sum;
}

void require_same_dim(const FeatureSet& a, const FeatureSet& b, std::string_view what);

/// Euclidean distances between every row of a and every row of b.
/// Rows are distributed over worker threads; each entry is reduced in a fixed
/// order, so the result does not depend on the worker count.
DistanceMatrix pairwise_distances(const FeatureSet& a, const FeatureSet& b);

/// Disjoint random subsets (drawn without replacement) of the requested sizes.
std::vector<std::vector<std::size_t>> split_indices(std::size_t n, std::span<const std::size_t> sizes,
                                                    SeededRng& rng);
std::vector<FeatureSet> seeded_split(const FeatureSet& set, std::span<const std::size_t> sizes,
                                     SeededRng& rng);

/// Number of rows a mix of n_out rows takes from the `other` pool:
/// round-half-to-even of t * n_out.
std::size_t mix_count(double t, std::size_t n_out);

/// n_out rows: mix_count(t, n_out) drawn without replacement from `other`, the
/// rest from `real`, shuffled together.
FeatureSet mix_sets(const FeatureSet& real, const FeatureSet& other, double t, std::size_t n_out,
                    SeededRng& rng);

// FSET on-disk format: "FSET", version 1, space tag byte, two zero bytes,
// n and d as little-endian u64, then n*d little-endian float32 row-major.
inline constexpr std::size_t kFsetHeaderBytes = 24;
inline constexpr std::uint8_t kFsetVersion = 1;

/// Loads an FSET file, or a headerless CSV when the extension is ".csv".
FeatureSet load_feature_file(const std::filesystem::path& path);

/// Writes an FSET file. Values are rounded to float32; a value that is not
/// finite after rounding is rejected before anything is written.
void write_feature_file(const FeatureSet& set, const std::filesystem::path& path);

std::vector<char> encode_fset(const FeatureSet& set);
FeatureSet decode_fset(std::span<const char> bytes);
FeatureSet parse_csv_features(std::string_view text);

}  // namespace genmetrics
