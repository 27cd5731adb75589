#include "camo/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>

#include <Eigen/Dense>

#include "camo/errors.hpp"

namespace camo {

namespace {

constexpr double kNearPlane = 1e-6;
constexpr float kNoDepth = std::numeric_limits<float>::infinity();

struct ScreenVertex {
    double x, y;   // continuous image coordinates
    double inv_z;  // 1 / camera depth
};

double edge(double ax, double ay, double bx, double by, double px, double py) {
    return (bx - ax) * (py - ay) - (by - ay) * (px - ax);
}

// Sutherland-Hodgman against z >= near in camera space.
std::vector<Vec3> clip_near(const std::array<Vec3, 3>& tri) {
    std::vector<Vec3> out;
    for (int i = 0; i < 3; ++i) {
        const Vec3& a = tri[i];
        const Vec3& b = tri[(i + 1) % 3];
        const bool a_in = a.z() >= kNearPlane;
        const bool b_in = b.z() >= kNearPlane;
        if (a_in) out.push_back(a);
        if (a_in != b_in) {
            const double s = (kNearPlane - a.z()) / (b.z() - a.z());
            out.push_back(a + s * (b - a));
        }
    }
    return out;
}

void raster_triangle(const ScreenVertex& a, const ScreenVertex& b, const ScreenVertex& c, DepthMap& out) {
    const double area = edge(a.x, a.y, b.x, b.y, c.x, c.y);
    if (area == 0.0 || !std::isfinite(area)) return;
    const double min_x = std::min({a.x, b.x, c.x});
    const double max_x = std::max({a.x, b.x, c.x});
    const double min_y = std::min({a.y, b.y, c.y});
    const double max_y = std::max({a.y, b.y, c.y});
    const int x0 = std::max(0, static_cast<int>(std::ceil(min_x - 0.5)));
    const int x1 = std::min(out.width - 1, static_cast<int>(std::floor(max_x - 0.5)));
    const int y0 = std::max(0, static_cast<int>(std::ceil(min_y - 0.5)));
    const int y1 = std::min(out.height - 1, static_cast<int>(std::floor(max_y - 0.5)));
    const double inv_area = 1.0 / area;
    for (int y = y0; y <= y1; ++y) {
        const double py = y + 0.5;
        for (int x = x0; x <= x1; ++x) {
            const double px = x + 0.5;
            const double w0 = edge(b.x, b.y, c.x, c.y, px, py) * inv_area;
            const double w1 = edge(c.x, c.y, a.x, a.y, px, py) * inv_area;
            const double w2 = edge(a.x, a.y, b.x, b.y, px, py) * inv_area;
            if (w0 < 0.0 || w1 < 0.0 || w2 < 0.0) continue;
            const double inv_z = w0 * a.inv_z + w1 * b.inv_z + w2 * c.inv_z;
            if (!(inv_z > 0.0)) continue;
            const float z = static_cast<float>(1.0 / inv_z);
            float& slot = out.depth[static_cast<size_t>(y) * out.width + x];
            if (z < slot) {
                slot = z;
                out.mask.set(y, x, true);
            }
        }
    }
}

}  // namespace

Projection project(const Vec3& x, const CameraView& view) {
    const Vec3 cam = view.R * x + view.t;
    if (cam.z() <= kMinDepth) throw BehindCameraError("point is behind or at the camera of view '" + view.id + "'");
    const Vec3 h = view.K * cam;
    return {Vec2(h.x() / h.z(), h.y() / h.z()), cam.z()};
}

Vec3 unproject(const Vec2& u, double depth, const CameraView& view) {
    if (!(depth > 0.0)) throw DomainError("unproject needs a positive depth");
    const Vec3 ray = view.K.triangularView<Eigen::Upper>().solve(Vec3(u.x(), u.y(), 1.0));
    return view.R.transpose() * (depth * ray) - view.R.transpose() * view.t;
}

Vec3 viewing_direction(const Vec2& u, const CameraView& view) {
    const Vec3 ray = view.K.triangularView<Eigen::Upper>().solve(Vec3(u.x(), u.y(), 1.0));
    return ray.normalized();
}

Vec3 camera_normal(const Vec3& n, const CameraView& view) { return view.R * n; }

DepthMap render_depth(const Mesh& world_mesh, const CameraView& view, int height, int width) {
    DepthMap out;
    out.height = height;
    out.width = width;
    out.depth.assign(static_cast<size_t>(height) * width, kNoDepth);
    out.mask = Mask(height, width);
    for (size_t f = 0; f < world_mesh.faces.size(); ++f) {
        const auto tri = world_mesh.triangle(f);
        const std::array<Vec3, 3> cam = {view.R * tri[0] + view.t, view.R * tri[1] + view.t,
                                         view.R * tri[2] + view.t};
        if (cam[0].z() < kNearPlane && cam[1].z() < kNearPlane && cam[2].z() < kNearPlane) continue;
        const auto poly = clip_near(cam);
        if (poly.size() < 3) continue;
        std::vector<ScreenVertex> sv;
        sv.reserve(poly.size());
        for (const auto& p : poly) {
            const Vec3 h = view.K * p;
            sv.push_back({h.x() / h.z(), h.y() / h.z(), 1.0 / p.z()});
        }
        for (size_t k = 1; k + 1 < sv.size(); ++k) raster_triangle(sv[0], sv[k], sv[k + 1], out);
    }
    return out;
}

DepthMap render_depth(const Mesh& mesh, const Similarity& object_to_world, const CameraView& view, int height,
                      int width) {
    return render_depth(transformed(mesh, object_to_world), view, height, width);
}

void save_depth_pfm(const std::filesystem::path& path, const DepthMap& depth) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("io", "cannot write " + path.string());
    out << "Pf\n" << depth.width << ' ' << depth.height << "\n-1.0\n";
    // PFM stores rows bottom to top, little endian.
    for (int y = depth.height - 1; y >= 0; --y)
        out.write(reinterpret_cast<const char*>(&depth.depth[static_cast<size_t>(y) * depth.width]),
                  static_cast<std::streamsize>(depth.width * sizeof(float)));
}

SurfacePoints visible_surface_points(const DepthMap& depth, const CameraView& view) {
    SurfacePoints out;
    for (int y = 0; y < depth.height; ++y) {
        for (int x = 0; x < depth.width; ++x) {
            if (!depth.covered(y, x)) continue;
            out.world.push_back(unproject(Vec2(x + 0.5, y + 0.5), depth.at(y, x), view));
            out.pixels.push_back({x, y});
        }
    }
    return out;
}

Vec3 nearest_face_normal(const TriangleBvh& bvh, const Vec3& x) {
    const auto hit = bvh.nearest(x);
    if (hit.face < 0) throw ContractError("nearest_face_normal on an empty mesh");
    return bvh.face_normals()[hit.face];
}

Vec3 nearest_face_normal(const Mesh& mesh, const Vec3& x) {
    if (mesh.faces.empty()) throw ContractError("nearest_face_normal on an empty mesh");
    return nearest_face_normal(TriangleBvh(mesh), x);
}

Eigen::VectorXd positional_encoding(const Vec3& x, int n_freq) {
    Eigen::VectorXd out(3 + 6 * n_freq);
    out.head<3>() = x;
    double freq = std::numbers::pi;
    for (int k = 0; k < n_freq; ++k, freq *= 2.0) {
        for (int c = 0; c < 3; ++c) {
            out[3 + 6 * k + c] = std::sin(freq * x[c]);
            out[3 + 6 * k + 3 + c] = std::cos(freq * x[c]);
        }
    }
    return out;
}

CoordinateNormalizer::CoordinateNormalizer(const Mesh& mesh) {
    const Vec3 lo = mesh.bbox_min();
    const Vec3 hi = mesh.bbox_max();
    center = 0.5 * (lo + hi);
    half_extent = 0.5 * (hi - lo);
    const double floor = 1e-6 * std::max(1e-12, half_extent.maxCoeff());
    half_extent = half_extent.cwiseMax(floor);
}

SurfaceQuery build_surface_query(std::span<const Vec3> world_points, const Similarity& object_to_world,
                                 const TriangleBvh& object_bvh, std::span<const CameraView* const> conditioning) {
    SurfaceQuery q;
    const size_t m = world_points.size();
    q.points.reserve(m);
    q.normals.reserve(m);
    std::vector<Vec3> world_normals;
    world_normals.reserve(m);
    for (const auto& xw : world_points) {
        const Vec3 xo = object_to_world.inverse_apply(xw);
        const Vec3 n = nearest_face_normal(object_bvh, xo);
        q.points.push_back(xo);
        q.normals.push_back(n);
        world_normals.push_back(object_to_world.apply_direction(n));
    }
    q.views.resize(conditioning.size());
    for (size_t j = 0; j < conditioning.size(); ++j) {
        const CameraView& view = *conditioning[j];
        ViewEncoding& enc = q.views[j];
        enc.pixels.resize(m);
        enc.directions.resize(m);
        enc.normals.resize(m);
        enc.in_front.resize(m);
        enc.in_bounds.resize(m);
        for (size_t i = 0; i < m; ++i) {
            const Vec3 cam = view.R * world_points[i] + view.t;
            enc.normals[i] = camera_normal(world_normals[i], view);
            if (cam.z() > kMinDepth) {
                const Vec3 h = view.K * cam;
                const Vec2 u(h.x() / h.z(), h.y() / h.z());
                enc.pixels[i] = u;
                enc.directions[i] = viewing_direction(u, view);
                enc.in_front[i] = 1;
                enc.in_bounds[i] = u.x() >= 0.0 && u.y() >= 0.0 && u.x() < view.width() && u.y() < view.height();
            } else {
                enc.pixels[i] = Vec2::Zero();
                enc.directions[i] = cam.norm() > 0.0 ? Vec3(cam.normalized()) : Vec3(0.0, 0.0, 1.0);
                enc.in_front[i] = 0;
                enc.in_bounds[i] = 0;
            }
        }
    }
    return q;
}

}  // namespace camo
