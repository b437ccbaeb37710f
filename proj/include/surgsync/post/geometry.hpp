#pragma once

#include <filesystem>
#include <optional>
#include <vector>

#include <Eigen/Core>
#include <nlohmann/json.hpp>

namespace surgsync::post {

/// Point in the robot base frame, meters.
using Point3 = Eigen::Vector3d;

/// Camera-from-base rigid transform (the hand-eye result).
struct RigidTransform {
    Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();
    Eigen::Vector3d translation = Eigen::Vector3d::Zero();

    /// Throws Error unless R is orthonormal with det +1 (within 1e-9).
    void validate() const;
    Eigen::Vector3d apply(const Point3& p) const { return rotation * p + translation; }
};

struct CameraIntrinsics {
    double fx = 1.0, fy = 1.0;
    double cx = 0.0, cy = 0.0;
    int width = 1, height = 1;

    void validate() const;
};

/// Per-pixel source coordinates for remapping; output(x, y) samples the
/// input at (map_x(x, y), map_y(x, y)).
struct RectificationMap {
    int width = 0, height = 0;
    std::vector<double> map_x, map_y;
};

struct StereoParams {
    double f = 1.0;  // rectified focal length, pixels
    double b = 1.0;  // baseline, meters
    CameraIntrinsics left, right;
    std::optional<RectificationMap> left_map, right_map;

    void validate() const;
};

struct PixelCoord {
    double u = 0.0;
    double v = 0.0;
};

/// Pinhole projection of a base-frame point. The result may fall outside
/// the image. Throws Error when the point is at or behind the camera plane.
PixelCoord project_point(const Point3& p, const RigidTransform& T, const CameraIntrinsics& K);

void from_json(const nlohmann::json& j, RigidTransform& t);
void to_json(nlohmann::json& j, const RigidTransform& t);
void from_json(const nlohmann::json& j, CameraIntrinsics& k);
void to_json(nlohmann::json& j, const CameraIntrinsics& k);

void from_json(const nlohmann::json& j, StereoParams& s);
void to_json(nlohmann::json& j, const StereoParams& s);

StereoParams load_stereo_params(const std::filesystem::path& path);
RigidTransform load_rigid_transform(const std::filesystem::path& path);
CameraIntrinsics load_intrinsics(const std::filesystem::path& path);

}  // namespace surgsync::post
