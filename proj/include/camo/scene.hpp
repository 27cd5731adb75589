#pragma once

#include <cstdint>
#include <filesystem>
#include <random>
#include <vector>

#include "camo/camera.hpp"
#include "camo/random.hpp"

namespace camo {



inline constexpr int kWorkingHeight = 384;
inline constexpr int kWorkingWidth = 576;
inline constexpr int kMinViews = 4;

/// Multi-view scene the object must hide in. `ground_plane` holds (a, b, c, d)
/// with unit normal, oriented so the cameras lie on its positive side.
struct Scene {
    std::string name;
    std::vector<CameraView> views;
    Vec4 ground_plane = Vec4(0, 0, 1, 0);
    Vec3 anchor = Vec3::Zero();
    double reference_length = 1.0;

    Vec3 up() const { return ground_plane.head<3>(); }
    double plane_distance(const Vec3& x) const { return ground_plane.head<3>().dot(x) + ground_plane[3]; }

    std::vector<int> view_indices(ViewRole role) const;
    const CameraView& view(const std::string& id) const;
};

/// Object pose on the ground plane.
struct Placement {
    Vec3 position = Vec3::Zero();
    double scale = 1.0;
    double yaw = 0.0;
};

struct PlacementConfig {
    double max_shift = 3.0;  // in units of reference_length
    double scale_min = 0.8;
    double scale_max = 1.2;
    bool random_yaw = false;
};

/// x_world = offset + linear * x_object, where linear = scale * rotation.
struct Similarity {
    Mat3 rotation = Mat3::Identity();
    double scale = 1.0;
    Vec3 offset = Vec3::Zero();

    Vec3 apply(const Vec3& x) const { return offset + scale * (rotation * x); }
    Vec3 apply_direction(const Vec3& n) const { return rotation * n; }
    Vec3 inverse_apply(const Vec3& x) const { return rotation.transpose() * (x - offset) / scale; }
};

struct LoadOptions {
    int height = kWorkingHeight;
    int width = kWorkingWidth;
};

/// Reads a scene manifest (JSON, see docs/scene_manifest.md). Images are
/// resized to the working resolution and intrinsics rescaled per axis.
Scene load_scene(const std::filesystem::path& manifest_path, const LoadOptions& options = {});

/// Writes images as PNG plus a manifest whose intrinsics match the stored
/// images; load_scene on the result reproduces the scene.
void save_scene(const Scene& scene, const std::filesystem::path& directory);

/// Validates every scene and camera invariant; throws ValidationError.
void validate_scene(const Scene& scene);

/// Converts one Bundler camera (looks down -z, y up, pixel origin at the
/// image center) to this toolkit's convention for an image of the given size.
void bundler_to_view(double focal, const Mat3& bundler_R, const Vec3& bundler_t, int width, int height,
                     CameraView& view);

struct BundlerCamera {
    double focal = 0.0;
    double k1 = 0.0;
    double k2 = 0.0;
    Mat3 R = Mat3::Identity();
    Vec3 t = Vec3::Zero();
};

/// Parses the camera section of a Bundler v0.3 `bundle.out` file.
std::vector<BundlerCamera> read_bundler_cameras(const std::filesystem::path& bundle_path);

/// Scales focal lengths and principal point by the per-axis resize ratio.
Mat3 rescale_intrinsics(const Mat3& K, double sx, double sy);

/// Same scene at another image size, intrinsics rescaled per axis.
Scene resize_scene(const Scene& scene, int height, int width);

/// Number of reserved test views for a scene with n views.
int test_view_count(int n_views);

/// Marks clamp(round(N/10), 1, 3) views as test, chosen uniformly by seed.
Scene split_views(Scene scene, uint64_t seed);

Placement anchor_placement(const Scene& scene);
Placement sample_placement(const Scene& scene, Rng& rng, const PlacementConfig& config = {});

/// Orthonormal frame (e1, e2, up) used to orient objects on the plane.
Mat3 plane_frame(const Vec3& up);

/// Object-to-world transform. Object space has its base at z = 0 with +z
/// along the plane normal; one object unit equals reference_length * scale.
Similarity object_to_world(const Scene& scene, const Placement& placement);

}  // namespace camo
