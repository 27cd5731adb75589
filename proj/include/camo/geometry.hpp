#pragma once

#include <filesystem>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "camo/bvh.hpp"
#include "camo/camera.hpp"
#include "camo/mesh.hpp"
#include "camo/scene.hpp"

namespace camo {

inline constexpr double kMinDepth = 1e-8;
inline constexpr int kDefaultFrequencies = 10;

struct Projection {
    Vec2 pixel;    // continuous image coordinates, origin at the top-left corner
    double depth;  // camera-space z
};

/// Pinhole projection u = dehomogenize(K (R x + t)). Throws BehindCameraError
/// when the camera-space depth is <= 1e-8.
Projection project(const Vec3& x, const CameraView& view);

/// x = d R^T K^-1 [u; 1] - R^T t. Throws DomainError for d <= 0.
Vec3 unproject(const Vec2& u, double depth, const CameraView& view);

/// Unit viewing direction K^-1 [u; 1] / |K^-1 [u; 1]| in camera coordinates.
Vec3 viewing_direction(const Vec2& u, const CameraView& view);

/// Camera-space normal R n.
Vec3 camera_normal(const Vec3& n, const CameraView& view);

/// Per-pixel camera-space depth of the nearest surface, +inf where the
/// object does not cover the pixel center.
struct DepthMap {
    int height = 0;
    int width = 0;
    std::vector<float> depth;
    Mask mask;

    float at(int y, int x) const { return depth[static_cast<size_t>(y) * width + x]; }
    bool covered(int y, int x) const { return mask.at(y, x); }
    bool empty() const { return mask.empty(); }
};

/// Rasterizes a world-space mesh with a z-buffer; depth is interpolated
/// perspective-correctly and triangles are clipped at the near plane.
DepthMap render_depth(const Mesh& world_mesh, const CameraView& view, int height, int width);

/// Same, for an object-space mesh placed in the scene.
DepthMap render_depth(const Mesh& mesh, const Similarity& object_to_world, const CameraView& view, int height,
                      int width);

/// Writes the depth map as a PFM (32-bit float, +inf preserved).
void save_depth_pfm(const std::filesystem::path& path, const DepthMap& depth);

struct PixelCoord {
    int x = 0;
    int y = 0;
    bool operator==(const PixelCoord&) const = default;
};

/// Visible surface points of a depth map: one world-space point per covered
/// pixel, unprojected from the pixel center, in row-major pixel order.
struct SurfacePoints {
    std::vector<Vec3> world;
    std::vector<PixelCoord> pixels;
    size_t size() const { return world.size(); }
};

SurfacePoints visible_surface_points(const DepthMap& depth, const CameraView& view);

/// Normal of the face closest to x (object space); ties go to the lowest face index.
Vec3 nearest_face_normal(const TriangleBvh& bvh, const Vec3& x);
Vec3 nearest_face_normal(const Mesh& mesh, const Vec3& x);

/// gamma(x) = (x, sin(2^k pi x), cos(2^k pi x)) for k = 0..n_freq-1, with the
/// sin and cos blocks each holding the three coordinates. Size 3 + 6 n_freq.
Eigen::VectorXd positional_encoding(const Vec3& x, int n_freq = kDefaultFrequencies);

/// Maps object-space coordinates to [-1, 1]^3 using the mesh bounding box.
struct CoordinateNormalizer {
    Vec3 center = Vec3::Zero();
    Vec3 half_extent = Vec3::Ones();

    explicit CoordinateNormalizer(const Mesh& mesh);
    CoordinateNormalizer() = default;
    Vec3 operator()(const Vec3& x) const { return (x - center).cwiseQuotient(half_extent); }
};

/// Perspective encoding of every query point in one conditioning view.
struct ViewEncoding {
    std::vector<Vec2> pixels;       // projections u_i
    std::vector<Vec3> directions;   // unit viewing directions v_i (camera frame)
    std::vector<Vec3> normals;      // camera-space normals n_i
    std::vector<uint8_t> in_front;  // point has positive depth in this view
    std::vector<uint8_t> in_bounds; // projection lands inside the image
};

/// Input bundle of the texture MLP: object-space points and normals plus
/// their encoding in each conditioning view.
struct SurfaceQuery {
    std::vector<Vec3> points;   // object space
    std::vector<Vec3> normals;  // object space, unit
    std::vector<ViewEncoding> views;

    size_t size() const { return points.size(); }
};

/// Builds the query for world-space surface points of a placed object.
/// `object_bvh` must be built over the object-space mesh.
SurfaceQuery build_surface_query(std::span<const Vec3> world_points, const Similarity& object_to_world,
                                 const TriangleBvh& object_bvh, std::span<const CameraView* const> conditioning);

}  // namespace camo
