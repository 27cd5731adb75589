#pragma once

#include <cstdint>
#include <filesystem>

#include "camo/scene.hpp"

namespace camo {

/// Procedural test scene: a textured ground plane z = 0 photographed by a
/// ring of cameras looking at the anchor (origin), with analytic K, R, t.
struct FixtureOptions {
    int height = kWorkingHeight;
    int width = kWorkingWidth;
    int n_views = 8;
    double ring_radius = 6.0;
    double camera_height = 3.0;
    double focal_scale = 1.2;  // focal length in units of image width
    uint64_t seed = 7;
    int supersample = 2;
};

Scene make_fixture_scene(const FixtureOptions& options = {});

/// Ground color at world (x, y); the same function renders every view.
Rgb fixture_ground_color(double x, double y, uint64_t seed);

/// Generates the scene and writes it as a manifest directory.
void write_fixture_scene(const std::filesystem::path& directory, const FixtureOptions& options = {});

/// Camera at `eye` looking at `target` with world +z up.
CameraView look_at(const Vec3& eye, const Vec3& target, double focal, int width, int height);

}  // namespace camo
