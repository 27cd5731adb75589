#pragma once

// Independent reference implementations used to check the library.

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <vector>

#include "camo/fixture.hpp"
#include "camo/geometry.hpp"
#include "camo/mesh.hpp"
#include "camo/random.hpp"

namespace oracle {

using camo::Vec3;

// Ray/plane intersection followed by an inside test on edge cross products.
inline std::optional<double> ray_hit(const Vec3& o, const Vec3& d, const Vec3& a, const Vec3& b, const Vec3& c) {
    const Vec3 n = (b - a).cross(c - a);
    const double denom = n.dot(d);
    if (std::abs(denom) < 1e-300) return std::nullopt;
    const double t = n.dot(a - o) / denom;
    if (!(t > 0.0)) return std::nullopt;
    const Vec3 p = o + t * d;
    const double s0 = n.dot((b - a).cross(p - a));
    const double s1 = n.dot((c - b).cross(p - b));
    const double s2 = n.dot((a - c).cross(p - c));
    if (s0 < 0.0 || s1 < 0.0 || s2 < 0.0) return std::nullopt;
    return t;
}

inline double segment_distance_sq(const Vec3& p, const Vec3& a, const Vec3& b) {
    const Vec3 ab = b - a;
    const double t = std::clamp((p - a).dot(ab) / ab.squaredNorm(), 0.0, 1.0);
    return (a + t * ab - p).squaredNorm();
}

// Plane projection when it falls inside, otherwise the closest edge.
inline double triangle_distance_sq(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c) {
    const Vec3 n = (b - a).cross(c - a).normalized();
    const double h = n.dot(p - a);
    const Vec3 q = p - h * n;
    const bool inside = n.dot((b - a).cross(q - a)) >= 0.0 && n.dot((c - b).cross(q - b)) >= 0.0 &&
                        n.dot((a - c).cross(q - c)) >= 0.0;
    if (inside) return h * h;
    return std::min({segment_distance_sq(p, a, b), segment_distance_sq(p, b, c), segment_distance_sq(p, c, a)});
}

inline double mesh_distance(const camo::Mesh& mesh, const Vec3& p) {
    double best = std::numeric_limits<double>::infinity();
    for (size_t f = 0; f < mesh.faces.size(); ++f) {
        const auto t = mesh.triangle(f);
        best = std::min(best, triangle_distance_sq(p, t[0], t[1], t[2]));
    }
    return std::sqrt(best);
}

inline int nearest_face(const camo::Mesh& mesh, const Vec3& p) {
    int best = -1;
    double best_d = std::numeric_limits<double>::infinity();
    for (size_t f = 0; f < mesh.faces.size(); ++f) {
        const auto t = mesh.triangle(f);
        const double d = triangle_distance_sq(p, t[0], t[1], t[2]);
        if (d < best_d) {
            best_d = d;
            best = static_cast<int>(f);
        }
    }
    return best;
}

// Closed star-shaped mesh: a latitude/longitude sphere with noisy radius.
inline camo::Mesh random_blob(camo::Rng& rng, int rings = 8, int segments = 12) {
    std::vector<Vec3> v;
    std::vector<camo::Face> f;
    const double pi = 3.14159265358979323846;
    v.push_back(Vec3(0, 0, camo::uniform(rng, 0.7, 1.3)));
    for (int r = 1; r < rings; ++r) {
        const double th = pi * r / rings;
        for (int s = 0; s < segments; ++s) {
            const double ph = 2 * pi * s / segments;
            const double rad = camo::uniform(rng, 0.7, 1.3);
            v.push_back(rad * Vec3(std::sin(th) * std::cos(ph), std::sin(th) * std::sin(ph), std::cos(th)));
        }
    }
    v.push_back(Vec3(0, 0, -camo::uniform(rng, 0.7, 1.3)));
    const int south = static_cast<int>(v.size()) - 1;
    const auto id = [segments](int r, int s) { return 1 + (r - 1) * segments + (s % segments); };
    for (int s = 0; s < segments; ++s) f.push_back({0, id(1, s), id(1, s + 1)});
    for (int r = 1; r + 1 < rings; ++r)
        for (int s = 0; s < segments; ++s) {
            f.push_back({id(r, s), id(r + 1, s), id(r + 1, s + 1)});
            f.push_back({id(r, s), id(r + 1, s + 1), id(r, s + 1)});
        }
    for (int s = 0; s < segments; ++s) f.push_back({south, id(rings - 1, s + 1), id(rings - 1, s)});
    return camo::make_mesh(std::move(v), std::move(f));
}

// Camera on a random direction around the origin, looking at it.
inline camo::CameraView random_camera(camo::Rng& rng, int width, int height) {
    Vec3 dir;
    do {
        dir = Vec3(camo::normal(rng), camo::normal(rng), camo::normal(rng));
    } while (dir.norm() < 1e-3 || std::abs(dir.normalized().z()) > 0.95);
    const Vec3 eye = dir.normalized() * camo::uniform(rng, 3.0, 6.0);
    camo::CameraView v = camo::look_at(eye, Vec3(camo::uniform(rng, -0.2, 0.2), camo::uniform(rng, -0.2, 0.2), 0.0),
                                       camo::uniform(rng, 0.8, 1.5) * width, width, height);
    v.image = camo::Image(height, width);
    return v;
}

struct RasterAgreement {
    long compared = 0;
    long agree = 0;
};

// Casts one ray per pixel center against every triangle and compares with
// the rasterized depth away from the 1-pixel silhouette band.
inline RasterAgreement compare_with_ray_casting(const camo::Mesh& world, const camo::CameraView& view,
                                                const camo::DepthMap& depth) {
    RasterAgreement r;
    const Vec3 c = view.center();
    const camo::Mat3 Kinv = view.K.inverse();
    for (int y = 0; y < depth.height; ++y) {
        for (int x = 0; x < depth.width; ++x) {
            bool band = false;
            for (int dy = -1; dy <= 1 && !band; ++dy)
                for (int dx = -1; dx <= 1 && !band; ++dx) {
                    const int yy = std::clamp(y + dy, 0, depth.height - 1), xx = std::clamp(x + dx, 0, depth.width - 1);
                    band = depth.covered(yy, xx) != depth.covered(y, x);
                }
            if (band || !depth.covered(y, x)) continue;
            const Vec3 dir = view.R.transpose() * (Kinv * Vec3(x + 0.5, y + 0.5, 1.0));
            double best = std::numeric_limits<double>::infinity();
            for (size_t f = 0; f < world.faces.size(); ++f) {
                const auto t = world.triangle(f);
                if (const auto h = ray_hit(c, dir, t[0], t[1], t[2])) best = std::min(best, *h);
            }
            ++r.compared;
            // dir has unit camera-space z, so t is the depth.
            if (std::isfinite(best) && std::abs(best - depth.at(y, x)) <= 1e-4 * best) ++r.agree;
        }
    }
    return r;
}

}  // namespace oracle
