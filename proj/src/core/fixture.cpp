#include "camo/fixture.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include <Eigen/Dense>

#include "camo/random.hpp"

namespace camo {

namespace {

// Hash-based value noise so the texture is a pure function of (x, y, seed).
double lattice(int64_t ix, int64_t iy, uint64_t seed) {
    uint64_t h = seed * 0x9E3779B97F4A7C15ULL;
    h ^= static_cast<uint64_t>(ix) * 0xC2B2AE3D27D4EB4FULL;
    h ^= static_cast<uint64_t>(iy) * 0x165667B19E3779F9ULL;
    h ^= h >> 33;
    h *= 0xFF51AFD7ED558CCDULL;
    h ^= h >> 33;
    return static_cast<double>(h >> 11) * 0x1.0p-53;
}

double smooth(double t) { return t * t * (3.0 - 2.0 * t); }

double value_noise(double x, double y, uint64_t seed) {
    const double fx = std::floor(x), fy = std::floor(y);
    const auto ix = static_cast<int64_t>(fx), iy = static_cast<int64_t>(fy);
    const double sx = smooth(x - fx), sy = smooth(y - fy);
    const double a = lattice(ix, iy, seed), b = lattice(ix + 1, iy, seed);
    const double c = lattice(ix, iy + 1, seed), d = lattice(ix + 1, iy + 1, seed);
    return (a + (b - a) * sx) + ((c + (d - c) * sx) - (a + (b - a) * sx)) * sy;
}

double fractal(double x, double y, uint64_t seed) {
    double s = 0.0, amp = 0.5, freq = 1.0;
    for (int o = 0; o < 4; ++o, amp *= 0.5, freq *= 2.0) s += amp * value_noise(x * freq, y * freq, seed + o);
    return s / 0.9375;
}

}  // namespace

Rgb fixture_ground_color(double x, double y, uint64_t seed) {
    // Earthy base palette blended by low-frequency noise, plus a cell layer of
    // soft-edged "pebbles".
    const Eigen::Vector3d soil(0.45, 0.36, 0.25), moss(0.32, 0.42, 0.22), sand(0.70, 0.62, 0.45);
    const double n1 = fractal(0.6 * x, 0.6 * y, seed);
    const double n2 = fractal(0.9 * x + 17.0, 0.9 * y - 5.0, seed + 101);
    Eigen::Vector3d c = soil + (moss - soil) * smooth(std::clamp(1.6 * n1 - 0.3, 0.0, 1.0));
    c += (sand - c) * 0.6 * smooth(std::clamp(2.0 * n2 - 1.0, 0.0, 1.0));

    const double cell = 0.8;
    const double gx = std::floor(x / cell), gy = std::floor(y / cell);
    for (int dy = -1; dy <= 1; ++dy) {
        for (int dx = -1; dx <= 1; ++dx) {
            const auto cx = static_cast<int64_t>(gx) + dx, cy = static_cast<int64_t>(gy) + dy;
            if (lattice(cx, cy, seed + 7) < 0.35) continue;
            const double px = (cx + lattice(cx, cy, seed + 11)) * cell;
            const double py = (cy + lattice(cx, cy, seed + 13)) * cell;
            const double r = 0.12 + 0.18 * lattice(cx, cy, seed + 17);
            const double d = std::hypot(x - px, y - py);
            const double w = 1.0 - smooth(std::clamp((d - r) / 0.06 + 0.5, 0.0, 1.0));
            if (w <= 0.0) continue;
            const double tone = lattice(cx, cy, seed + 19);
            const Eigen::Vector3d pebble = Eigen::Vector3d(0.55, 0.52, 0.50) * (0.6 + 0.6 * tone) +
                                           Eigen::Vector3d(0.08, 0.02, -0.04) * lattice(cx, cy, seed + 23);
            c += (pebble - c) * w;
        }
    }
    const double grain = 0.06 * (value_noise(6.0 * x, 6.0 * y, seed + 31) - 0.5);
    c.array() += grain;
    return c.cwiseMax(0.0).cwiseMin(1.0).cast<float>();
}

CameraView look_at(const Vec3& eye, const Vec3& target, double focal, int width, int height) {
    const Vec3 forward = (target - eye).normalized();
    const Vec3 right = forward.cross(Vec3::UnitZ()).normalized();
    const Vec3 down = forward.cross(right);
    CameraView v;
    v.R.row(0) = right;
    v.R.row(1) = down;
    v.R.row(2) = forward;
    v.t = -v.R * eye;
    v.K << focal, 0.0, 0.5 * width, 0.0, focal, 0.5 * height, 0.0, 0.0, 1.0;
    return v;
}

Scene make_fixture_scene(const FixtureOptions& options) {
    Scene scene;
    scene.name = "fixture";
    scene.ground_plane = Vec4(0.0, 0.0, 1.0, 0.0);
    scene.anchor = Vec3::Zero();
    scene.reference_length = 1.0;
    const Vec3 target(0.0, 0.0, 0.5);
    const double focal = options.focal_scale * options.width;
    const int ss = std::max(1, options.supersample);
    for (int i = 0; i < options.n_views; ++i) {
        const double angle = 2.0 * std::numbers::pi * i / options.n_views + 0.3;
        const double h = options.camera_height * ((i % 2 == 0) ? 0.85 : 1.15);
        const double r = options.ring_radius * ((i % 3 == 0) ? 1.1 : 0.95);
        const Vec3 eye(r * std::cos(angle), r * std::sin(angle), h);
        CameraView v = look_at(eye, target, focal, options.width, options.height);
        v.id = "view" + std::to_string(i).insert(0, i < 10 ? "0" : "");
        v.image = Image(options.height, options.width);
        const Mat3 Kinv = v.K.inverse();
        const Vec3 c = v.center();
        for (int y = 0; y < options.height; ++y) {
            for (int x = 0; x < options.width; ++x) {
                Rgb acc = Rgb::Zero();
                for (int sy = 0; sy < ss; ++sy) {
                    for (int sx = 0; sx < ss; ++sx) {
                        const Vec3 u(x + (sx + 0.5) / ss, y + (sy + 0.5) / ss, 1.0);
                        const Vec3 dir = v.R.transpose() * (Kinv * u);
                        if (dir.z() < -1e-9) {
                            const double t = -c.z() / dir.z();
                            const Vec3 p = c + t * dir;
                            acc += fixture_ground_color(p.x(), p.y(), options.seed);
                        } else {
                            const double elev = std::clamp(dir.z() / dir.norm(), 0.0, 1.0);
                            acc += Rgb(0.62f, 0.74f, 0.90f) * static_cast<float>(1.0 - 0.3 * elev);
                        }
                    }
                }
                v.image.set_pixel(y, x, acc / static_cast<float>(ss * ss));
            }
        }
        scene.views.push_back(std::move(v));
    }
    return scene;
}

void write_fixture_scene(const std::filesystem::path& directory, const FixtureOptions& options) {
    save_scene(make_fixture_scene(options), directory);
}

}  // namespace camo
