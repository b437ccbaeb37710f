#include "surgsync/post/depth.hpp"

#include "surgsync/core/error.hpp"

namespace surgsync::post {

FloatImage disparity_to_depth(const FloatImage& disparity, const StereoParams& sp) {
    sp.validate();
    if (disparity.channels != 1) throw Error("disparity map must have one channel");
    const double fb = sp.f * sp.b;
    FloatImage depth = disparity;
    for (double& d : depth.data) d = (d > kMinDisparity && std::isfinite(d)) ? fb / d : kInvalidDepth;
    return depth;
}

}  // namespace surgsync::post
