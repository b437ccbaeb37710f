#include "surgsync/post/image_ops.hpp"

#include "surgsync/core/error.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

namespace surgsync::post {

namespace {

std::uint8_t clamp_byte(double v) {
    return static_cast<std::uint8_t>(std::clamp(std::round(v), 0.0, 255.0));
}

}  // namespace

FloatImage gaussian_heatmap(int width, int height, const HeatmapParams& hp) {
    if (width < 1 || height < 1) throw Error("heatmap size must be positive");
    if (!(hp.sigma_x > 0.0) || !(hp.sigma_y > 0.0)) throw Error("heatmap sigma must be positive");
    FloatImage g(width, height, 1);
    const double sx2 = hp.sigma_x * hp.sigma_x;
    const double sy2 = hp.sigma_y * hp.sigma_y;
    for (int y = 0; y < height; ++y) {
        const double dy = y - hp.v_p;
        const double ty = dy * dy / sy2;
        for (int x = 0; x < width; ++x) {
            const double dx = x - hp.u_p;
            g.at(x, y) = std::exp(-(dx * dx / sx2 + ty));
        }
    }
    return g;
}

ImageFrame attention_image(const ImageFrame& gray, const FloatImage& heatmap) {
    if (gray.channels() != 1) throw Error("attention_image expects a single-channel image");
    if (heatmap.channels != 1 || heatmap.width != gray.width() || heatmap.height != gray.height())
        throw Error(fmt::format("heatmap {}x{} does not match image {}x{}", heatmap.width, heatmap.height,
                                gray.width(), gray.height()));
    ImageFrame out(gray.width(), gray.height(), 1);
    for (int y = 0; y < gray.height(); ++y)
        for (int x = 0; x < gray.width(); ++x) out.at(x, y) = clamp_byte(heatmap.at(x, y) * gray.at(x, y));
    return out;
}

ImageFrame to_grayscale(const ImageFrame& rgb) {
    if (rgb.channels() != 3) throw Error(fmt::format("to_grayscale expects 3 channels, got {}", rgb.channels()));
    ImageFrame out(rgb.width(), rgb.height(), 1);
    for (int y = 0; y < rgb.height(); ++y)
        for (int x = 0; x < rgb.width(); ++x)
            out.at(x, y) = clamp_byte(0.299 * rgb.at(x, y, 0) + 0.587 * rgb.at(x, y, 1) + 0.114 * rgb.at(x, y, 2));
    return out;
}

ImageFrame apply_rectification(const ImageFrame& img, const RectificationMap& map) {
    const std::size_t n = static_cast<std::size_t>(map.width) * map.height;
    if (map.width < 1 || map.height < 1 || map.map_x.size() != n || map.map_y.size() != n)
        throw Error("rectification map dimensions are inconsistent");
    ImageFrame out(map.width, map.height, img.channels());
    const int w = img.width(), h = img.height();
    auto texel = [&](int x, int y, int c) -> double {
        if (x < 0 || y < 0 || x >= w || y >= h) return 0.0;
        return img.at(x, y, c);
    };
    for (int y = 0; y < map.height; ++y) {
        for (int x = 0; x < map.width; ++x) {
            const std::size_t i = static_cast<std::size_t>(y) * map.width + x;
            const double sx = map.map_x[i], sy = map.map_y[i];
            if (!std::isfinite(sx) || !std::isfinite(sy) || sx < 0.0 || sy < 0.0 || sx > w - 1 || sy > h - 1)
                continue;  // out of bounds stays 0
            const int x0 = static_cast<int>(std::floor(sx)), y0 = static_cast<int>(std::floor(sy));
            const double fx = sx - x0, fy = sy - y0;
            for (int c = 0; c < img.channels(); ++c) {
                double top = (1 - fx) * texel(x0, y0, c) + fx * texel(x0 + 1, y0, c);
                double bot = (1 - fx) * texel(x0, y0 + 1, c) + fx * texel(x0 + 1, y0 + 1, c);
                out.at(x, y, c) = clamp_byte((1 - fy) * top + fy * bot);
            }
        }
    }
    return out;
}

double laplacian_variance(const ImageFrame& gray) {
    if (gray.channels() != 1) throw Error("laplacian_variance expects a single-channel image");
    if (gray.width() < 3 || gray.height() < 3) throw Error("laplacian_variance needs at least 3x3 pixels");
    // Integer accumulation keeps the result exact up to the final division.
    __int128 sum = 0, sum_sq = 0;
    const std::int64_t n = static_cast<std::int64_t>(gray.width() - 2) * (gray.height() - 2);
    for (int y = 1; y < gray.height() - 1; ++y) {
        for (int x = 1; x < gray.width() - 1; ++x) {
            const std::int64_t r = gray.at(x, y - 1) + gray.at(x - 1, y) + gray.at(x + 1, y) + gray.at(x, y + 1) -
                                   4 * static_cast<std::int64_t>(gray.at(x, y));
            sum += r;
            sum_sq += r * r;
        }
    }
    const __int128 num = sum_sq * n - sum * sum;
    return static_cast<double>(num) / (static_cast<double>(n) * static_cast<double>(n));
}

FloatImage flow_magnitude_filter(const FloatImage& flow, double tau) {
    if (flow.channels != 2) throw Error("flow field must have 2 channels");
    if (!(tau >= 0.0)) throw Error("tau must be nonnegative");
    FloatImage out = flow;
    for (int y = 0; y < flow.height; ++y) {
        for (int x = 0; x < flow.width; ++x) {
            const double dx = flow.at(x, y, 0), dy = flow.at(x, y, 1);
            if (std::hypot(dx, dy) < tau) {
                out.at(x, y, 0) = 0.0;
                out.at(x, y, 1) = 0.0;
            }
        }
    }
    return out;
}

ImageFrame heatmap_to_image(const FloatImage& heatmap) {
    ImageFrame out(heatmap.width, heatmap.height, 1);
    for (int y = 0; y < heatmap.height; ++y)
        for (int x = 0; x < heatmap.width; ++x) out.at(x, y) = clamp_byte(255.0 * heatmap.at(x, y));
    return out;
}

}  // namespace surgsync::post
