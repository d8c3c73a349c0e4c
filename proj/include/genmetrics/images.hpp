#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "genmetrics/featureset.hpp"
#include "genmetrics/rng.hpp"

namespace genmetrics {

/// Grayscale image with intensities in [0, 1], row-major.
struct ToyImage {
    std::size_t height = 0;
    std::size_t width = 0;
    std::vector<double> pixels;

    double at(std::size_t y, std::size_t x) const noexcept { return pixels[y * width + x]; }
    friend bool operator==(const ToyImage&, const ToyImage&) = default;
};

/// Pixels at least this far from every border carry all intensity >= 1/32, so
/// integer shifts of up to kToyMaxSafeShift pixels never clip the blob.
inline constexpr std::size_t kToyMargin = 5;
inline constexpr std::size_t kToyMaxSafeShift = 4;
inline constexpr std::size_t kHistogramBins = 32;
inline constexpr std::size_t kToyMinSide = 16;

/// Single Gaussian intensity blob per image, with seeded center, width and
/// peak. The region where the intensity reaches 1/32 stays inside a
/// kToyMargin-pixel frame.
std::vector<ToyImage> generate_toy_images(std::size_t n, std::size_t height, std::size_t width,
                                          SeededRng& rng);

/// Integer translation with zero fill; dx moves columns, dy moves rows.
ToyImage shift_image(const ToyImage& image, int dx, int dy);

/// Rotation about the image center by `degrees` (counter-clockwise), bilinear
/// resampling, zero padding outside the source.
ToyImage rotate_image(const ToyImage& image, double degrees);

/// A seeded round(fraction * n) subset of the images is transformed: each
/// picked image is shifted by an integer offset uniform in
/// [-max_shift, max_shift]^2 or rotated by an angle uniform in
/// [-max_angle, max_angle], chosen by a coin flip. With max_angle == 0 every
/// picked image is shifted; with max_shift == 0 every picked image is rotated.
std::vector<ToyImage> transform_images(std::span<const ToyImage> images, int max_shift, double max_angle,
                                       double fraction, SeededRng& rng);

enum class ToyFeatureMap { pixel, histogram };

/// pixel: flattened raster (space pixel, d = h*w). histogram: 32-bin
/// normalized intensity histogram (space feature, d = 32).
FeatureSet toy_feature_map(std::span<const ToyImage> images, ToyFeatureMap map);

}  // namespace genmetrics
