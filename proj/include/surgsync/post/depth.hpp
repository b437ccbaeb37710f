#pragma once

#include "surgsync/core/image.hpp"
#include "surgsync/post/geometry.hpp"

#include <cmath>
#include <limits>

namespace surgsync::post {

/// Disparities at or below this many pixels produce invalid depth.
inline constexpr double kMinDisparity = 1e-6;

/// Marker for pixels without a valid depth (never 0).
inline constexpr double kInvalidDepth = std::numeric_limits<double>::quiet_NaN();

inline bool is_valid_depth(double d) { return !std::isnan(d); }

/// depth = f * b / disparity where disparity > kMinDisparity, else kInvalidDepth.
FloatImage disparity_to_depth(const FloatImage& disparity, const StereoParams& sp);

}  // namespace surgsync::post
