#pragma once

#include "surgsync/core/image.hpp"
#include "surgsync/post/geometry.hpp"

namespace surgsync::post {

struct HeatmapParams {
    double u_p = 0.0, v_p = 0.0;          // center, pixels
    double sigma_x = 1.0, sigma_y = 1.0;  // spread, pixels
};

/// G(x, y) = exp(-((x - u_p)^2 / sigma_x^2 + (y - v_p)^2 / sigma_y^2)) at
/// integer pixel coordinates, the same convention as the projected (u_p, v_p).
/// No factor of 2 in the denominators.
FloatImage gaussian_heatmap(int width, int height, const HeatmapParams& hp);

/// I_a = round(G * I_gray), clamped to [0, 255].
ImageFrame attention_image(const ImageFrame& gray, const FloatImage& heatmap);

/// y = round(0.299 R + 0.587 G + 0.114 B), clamped to [0, 255].
ImageFrame to_grayscale(const ImageFrame& rgb);

/// Bilinear remap; samples outside the input are 0.
ImageFrame apply_rectification(const ImageFrame& img, const RectificationMap& map);

/// Population variance of the 4-neighbour Laplacian response over the
/// interior pixels (no padding).
double laplacian_variance(const ImageFrame& gray);

/// Zeroes flow vectors with magnitude below tau.
FloatImage flow_magnitude_filter(const FloatImage& flow, double tau);

/// Heatmap scaled to 8 bits for visualisation.
ImageFrame heatmap_to_image(const FloatImage& heatmap);

}  // namespace surgsync::post
