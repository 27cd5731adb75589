#pragma once

#include <string>

#include <Eigen/Core>

#include "camo/image.hpp"

namespace camo {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Vec4 = Eigen::Vector4d;
using Mat3 = Eigen::Matrix3d;

enum class ViewRole { train, test };

const char* to_string(ViewRole role);
ViewRole parse_view_role(const std::string& s);

/// One photograph with its calibrated pinhole camera. Convention: x right,
/// y down, z forward; X_cam = R * X_world + t.
struct CameraView {
    std::string id;
    Image image;
    Mat3 K = Mat3::Identity();
    Mat3 R = Mat3::Identity();
    Vec3 t = Vec3::Zero();
    ViewRole role = ViewRole::train;

    Vec3 center() const { return -R.transpose() * t; }
    int height() const { return image.height; }
    int width() const { return image.width; }
};

/// Checks R orthonormal with det 1 and K upper triangular with positive
/// focal lengths and K(2,2) = 1. Throws ValidationError naming the view.
void validate_camera(const CameraView& view, double tol = 1e-6);

}  // namespace camo
