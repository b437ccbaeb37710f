#include "surgsync/post/geometry.hpp"

#include "surgsync/core/error.hpp"
#include "surgsync/core/png_io.hpp"

#include <cmath>

#include <Eigen/LU>
#include <fmt/format.h>

namespace surgsync::post {

void RigidTransform::validate() const {
    if (!rotation.allFinite() || !translation.allFinite()) throw Error("rigid transform has non-finite entries");
    double ortho = (rotation.transpose() * rotation - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff();
    if (ortho > 1e-9) throw Error(fmt::format("rotation is not orthonormal (error {:.3g})", ortho));
    double det = rotation.determinant();
    if (std::abs(det - 1.0) > 1e-9) throw Error(fmt::format("rotation determinant {} != +1", det));
}

void CameraIntrinsics::validate() const {
    if (!(fx > 0.0) || !(fy > 0.0)) throw Error("focal lengths must be positive");
    if (width < 1 || height < 1) throw Error("image size must be positive");
    if (!(cx >= 0.0 && cx < width) || !(cy >= 0.0 && cy < height))
        throw Error("principal point outside the image");
}

void StereoParams::validate() const {
    if (!(f > 0.0) || !std::isfinite(f)) throw Error("stereo focal length must be positive");
    if (!(b > 0.0) || !std::isfinite(b)) throw Error("stereo baseline must be positive");
}

PixelCoord project_point(const Point3& p, const RigidTransform& T, const CameraIntrinsics& K) {
    if (!p.allFinite()) throw Error("point has non-finite components");
    const Eigen::Vector3d c = T.apply(p);
    if (!(c.z() > 0.0)) throw Error(fmt::format("point is behind the camera (z_c = {})", c.z()));
    return {K.fx * c.x() / c.z() + K.cx, K.fy * c.y() / c.z() + K.cy};
}

void from_json(const nlohmann::json& j, RigidTransform& t) {
    const auto& r = j.at("rotation");
    if (r.size() != 3) throw Error("rotation must be 3x3");
    for (int i = 0; i < 3; ++i) {
        if (r[i].size() != 3) throw Error("rotation must be 3x3");
        for (int k = 0; k < 3; ++k) t.rotation(i, k) = r[i][k].get<double>();
    }
    const auto& tr = j.at("translation");
    if (tr.size() != 3) throw Error("translation must have 3 entries");
    for (int i = 0; i < 3; ++i) t.translation(i) = tr[i].get<double>();
}

void to_json(nlohmann::json& j, const RigidTransform& t) {
    auto rot = nlohmann::json::array();
    for (int i = 0; i < 3; ++i) rot.push_back({t.rotation(i, 0), t.rotation(i, 1), t.rotation(i, 2)});
    j = nlohmann::json{{"rotation", rot}, {"translation", {t.translation(0), t.translation(1), t.translation(2)}}};
}

void from_json(const nlohmann::json& j, CameraIntrinsics& k) {
    k.fx = j.at("fx").get<double>();
    k.fy = j.at("fy").get<double>();
    k.cx = j.at("cx").get<double>();
    k.cy = j.at("cy").get<double>();
    k.width = j.at("width").get<int>();
    k.height = j.at("height").get<int>();
}

void to_json(nlohmann::json& j, const CameraIntrinsics& k) {
    j = nlohmann::json{{"fx", k.fx}, {"fy", k.fy}, {"cx", k.cx}, {"cy", k.cy}, {"width", k.width}, {"height", k.height}};
}

void from_json(const nlohmann::json& j, StereoParams& s) {
    s.f = j.at("f").get<double>();
    s.b = j.at("b").get<double>();
    if (j.contains("left")) s.left = j["left"].get<CameraIntrinsics>();
    if (j.contains("right")) s.right = j["right"].get<CameraIntrinsics>();
}

void to_json(nlohmann::json& j, const StereoParams& s) {
    j = nlohmann::json{{"f", s.f}, {"b", s.b}, {"left", s.left}, {"right", s.right}};
}

namespace {

template <typename T>
T load_json_file(const std::filesystem::path& path) {
    auto bytes = read_file_bytes(path);
    try {
        return nlohmann::json::parse(bytes.begin(), bytes.end()).get<T>();
    } catch (const nlohmann::json::exception& e) {
        throw Error(fmt::format("{}: {}", path.string(), e.what()));
    }
}

}  // namespace

RigidTransform load_rigid_transform(const std::filesystem::path& path) {
    auto t = load_json_file<RigidTransform>(path);
    t.validate();
    return t;
}

StereoParams load_stereo_params(const std::filesystem::path& path) {
    auto s = load_json_file<StereoParams>(path);
    s.validate();
    return s;
}

CameraIntrinsics load_intrinsics(const std::filesystem::path& path) {
    auto k = load_json_file<CameraIntrinsics>(path);
    k.validate();
    return k;
}

}  // namespace surgsync::post
