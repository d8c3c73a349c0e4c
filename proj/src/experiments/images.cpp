#include "genmetrics/images.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "genmetrics/error.hpp"

namespace genmetrics {

namespace {

// Radius beyond which a blob of peak `amplitude` and width `sigma` falls
// below 1/64 (half the first histogram bin edge, for slack).
double support_radius(double sigma, double amplitude) {
    return sigma * std::sqrt(2.0 * std::log(64.0 * amplitude));
}

}  // namespace

std::vector<ToyImage> generate_toy_images(std::size_t n, std::size_t height, std::size_t width,
                                          SeededRng& rng) {
    if (height < kToyMinSide || width < kToyMinSide) {
        fail(ErrorCode::validation, "toy images need height and width >= " + std::to_string(kToyMinSide));
    }
    const double side = static_cast<double>(std::min(height, width));
    const double usable = side - 1.0 - 2.0 * static_cast<double>(kToyMargin);
    const double sigma_max = std::min(3.0, 0.8 * usable / (2.0 * support_radius(1.0, 1.0)));
    const double sigma_min = 0.5 * sigma_max;

    std::vector<ToyImage> images;
    images.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double sigma = rng.uniform(sigma_min, sigma_max);
        const double amplitude = rng.uniform(0.6, 1.0);
        const double reach = support_radius(sigma, amplitude) + static_cast<double>(kToyMargin);
        const double cy = rng.uniform(reach, static_cast<double>(height) - 1.0 - reach);
        const double cx = rng.uniform(reach, static_cast<double>(width) - 1.0 - reach);

        ToyImage img{height, width, std::vector<double>(height * width)};
        const double inv = 1.0 / (2.0 * sigma * sigma);
        for (std::size_t y = 0; y < height; ++y) {
            for (std::size_t x = 0; x < width; ++x) {
                const double dy = static_cast<double>(y) - cy;
                const double dx = static_cast<double>(x) - cx;
                img.pixels[y * width + x] = amplitude * std::exp(-(dx * dx + dy * dy) * inv);
            }
        }
        images.push_back(std::move(img));
    }
    return images;
}

ToyImage shift_image(const ToyImage& image, int dx, int dy) {
    ToyImage out{image.height, image.width, std::vector<double>(image.pixels.size(), 0.0)};
    const auto h = static_cast<long>(image.height);
    const auto w = static_cast<long>(image.width);
    for (long y = 0; y < h; ++y) {
        const long sy = y - dy;
        if (sy < 0 || sy >= h) continue;
        for (long x = 0; x < w; ++x) {
            const long sx = x - dx;
            if (sx < 0 || sx >= w) continue;
            out.pixels[static_cast<std::size_t>(y * w + x)] = image.pixels[static_cast<std::size_t>(sy * w + sx)];
        }
    }
    return out;
}

ToyImage rotate_image(const ToyImage& image, double degrees) {
    ToyImage out{image.height, image.width, std::vector<double>(image.pixels.size(), 0.0)};
    const double theta = degrees * std::numbers::pi / 180.0;
    const double c = std::cos(theta);
    const double s = std::sin(theta);
    const double cy = (static_cast<double>(image.height) - 1.0) / 2.0;
    const double cx = (static_cast<double>(image.width) - 1.0) / 2.0;
    const auto h = static_cast<long>(image.height);
    const auto w = static_cast<long>(image.width);
    const auto sample = [&](long y, long x) {
        return (y < 0 || y >= h || x < 0 || x >= w) ? 0.0
                                                     : image.pixels[static_cast<std::size_t>(y * w + x)];
    };
    for (long y = 0; y < h; ++y) {
        for (long x = 0; x < w; ++x) {
            // Inverse mapping: source = R(-theta) (target - center) + center.
            const double ty = static_cast<double>(y) - cy;
            const double tx = static_cast<double>(x) - cx;
            const double sx = c * tx + s * ty + cx;
            const double sy = -s * tx + c * ty + cy;
            const double fx = std::floor(sx);
            const double fy = std::floor(sy);
            const double ax = sx - fx;
            const double ay = sy - fy;
            const auto x0 = static_cast<long>(fx);
            const auto y0 = static_cast<long>(fy);
            const double v = (1 - ay) * ((1 - ax) * sample(y0, x0) + ax * sample(y0, x0 + 1)) +
                             ay * ((1 - ax) * sample(y0 + 1, x0) + ax * sample(y0 + 1, x0 + 1));
            out.pixels[static_cast<std::size_t>(y * w + x)] = std::clamp(v, 0.0, 1.0);
        }
    }
    return out;
}

std::vector<ToyImage> transform_images(std::span<const ToyImage> images, int max_shift, double max_angle,
                                       double fraction, SeededRng& rng) {
    if (max_shift < 0 || !(max_angle >= 0.0)) {
        fail(ErrorCode::validation, "transform magnitudes must be non-negative");
    }
    std::vector<ToyImage> out(images.begin(), images.end());
    const std::size_t count = mix_count(fraction, images.size());
    const auto picked = rng.sample_without_replacement(images.size(), count);
    for (const auto i : picked) {
        bool rotate = false;
        if (max_angle == 0.0) {
            rotate = false;
        } else if (max_shift == 0) {
            rotate = true;
        } else {
            rotate = rng.below(2) == 1;
        }
        if (rotate) {
            out[i] = rotate_image(images[i], rng.uniform(-max_angle, max_angle));
        } else {
            const auto dx = static_cast<int>(rng.between(-max_shift, max_shift));
            const auto dy = static_cast<int>(rng.between(-max_shift, max_shift));
            out[i] = shift_image(images[i], dx, dy);
        }
    }
    return out;
}

FeatureSet toy_feature_map(std::span<const ToyImage> images, ToyFeatureMap map) {
    if (images.empty()) fail(ErrorCode::validation, "feature map needs at least one image");
    const std::size_t h = images.front().height;
    const std::size_t w = images.front().width;
    for (const auto& img : images) {
        if (img.height != h || img.width != w || img.pixels.size() != h * w) {
            fail(ErrorCode::dimension, "toy images must share one size");
        }
    }
    if (map == ToyFeatureMap::pixel) {
        std::vector<double> data;
        data.reserve(images.size() * h * w);
        for (const auto& img : images) data.insert(data.end(), img.pixels.begin(), img.pixels.end());
        return FeatureSet(std::move(data), images.size(), h * w, SpaceTag::pixel, "toy-pixels");
    }
    std::vector<double> data(images.size() * kHistogramBins, 0.0);
    const double unit = 1.0 / static_cast<double>(h * w);
    for (std::size_t i = 0; i < images.size(); ++i) {
        double* hist = data.data() + i * kHistogramBins;
        for (const double v : images[i].pixels) {
            const auto bin = std::min<std::size_t>(
                kHistogramBins - 1, static_cast<std::size_t>(std::clamp(v, 0.0, 1.0) * kHistogramBins));
            hist[bin] += unit;
        }
    }
    return FeatureSet(std::move(data), images.size(), kHistogramBins, SpaceTag::feature, "toy-histogram");
}

}  // namespace genmetrics
