#include "camo/bvh.hpp"

#include <algorithm>
#include <limits>

namespace camo {

namespace {

constexpr int kLeafSize = 4;
constexpr double kInf = std::numeric_limits<double>::infinity();

double box_distance_sq(const Eigen::AlignedBox3d& box, const Vec3& p) {
    return box.squaredExteriorDistance(p);
}

// Slab test; returns entry distance or +inf on miss.
double ray_box(const Eigen::AlignedBox3d& box, const Vec3& origin, const Vec3& inv_dir, double t_min, double t_max) {
    for (int a = 0; a < 3; ++a) {
        double t0 = (box.min()[a] - origin[a]) * inv_dir[a];
        double t1 = (box.max()[a] - origin[a]) * inv_dir[a];
        if (t0 > t1) std::swap(t0, t1);
        // NaN (0 * inf) means the origin lies on the slab boundary: keep going.
        if (t0 == t0) t_min = std::max(t_min, t0);
        if (t1 == t1) t_max = std::min(t_max, t1);
        if (t_max < t_min) return kInf;
    }
    return t_min;
}

}  // namespace

std::optional<double> ray_triangle(const Vec3& origin, const Vec3& direction, const Vec3& a, const Vec3& b,
                                   const Vec3& c) {
    const Vec3 e1 = b - a;
    const Vec3 e2 = c - a;
    const Vec3 p = direction.cross(e2);
    const double det = e1.dot(p);
    const double scale = e1.norm() * e2.norm() * direction.norm();
    if (std::abs(det) <= 1e-14 * scale) return std::nullopt;
    const double inv = 1.0 / det;
    const Vec3 s = origin - a;
    const double u = s.dot(p) * inv;
    if (u < 0.0 || u > 1.0) return std::nullopt;
    const Vec3 q = s.cross(e1);
    const double v = direction.dot(q) * inv;
    if (v < 0.0 || u + v > 1.0) return std::nullopt;
    const double t = e2.dot(q) * inv;
    if (!(t > 0.0)) return std::nullopt;
    return t;
}

Vec3 closest_point_on_triangle(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c) {
    // Voronoi-region walk (Ericson, Real-Time Collision Detection 5.1.5).
    const Vec3 ab = b - a, ac = c - a, ap = p - a;
    const double d1 = ab.dot(ap), d2 = ac.dot(ap);
    if (d1 <= 0.0 && d2 <= 0.0) return a;
    const Vec3 bp = p - b;
    const double d3 = ab.dot(bp), d4 = ac.dot(bp);
    if (d3 >= 0.0 && d4 <= d3) return b;
    const double vc = d1 * d4 - d3 * d2;
    if (vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0) return a + (d1 / (d1 - d3)) * ab;
    const Vec3 cp = p - c;
    const double d5 = ab.dot(cp), d6 = ac.dot(cp);
    if (d6 >= 0.0 && d5 <= d6) return c;
    const double vb = d5 * d2 - d1 * d6;
    if (vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0) return a + (d2 / (d2 - d6)) * ac;
    const double va = d3 * d6 - d5 * d4;
    if (va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0)
        return b + ((d4 - d3) / ((d4 - d3) + (d5 - d6))) * (c - b);
    const double denom = 1.0 / (va + vb + vc);
    return a + ab * (vb * denom) + ac * (vc * denom);
}

TriangleBvh::TriangleBvh(const Mesh& mesh) : normals_(mesh.face_normals) {
    tris_.reserve(mesh.faces.size());
    for (size_t f = 0; f < mesh.faces.size(); ++f) tris_.push_back(mesh.triangle(f));
    order_.resize(tris_.size());
    for (size_t i = 0; i < order_.size(); ++i) order_[i] = static_cast<int>(i);
    if (!tris_.empty()) {
        nodes_.reserve(2 * tris_.size());
        build(0, static_cast<int>(tris_.size()));
    }
}

int TriangleBvh::build(int begin, int end) {
    const int index = static_cast<int>(nodes_.size());
    nodes_.emplace_back();
    Eigen::AlignedBox3d box;
    Eigen::AlignedBox3d centroids;
    for (int i = begin; i < end; ++i) {
        for (const auto& v : tris_[order_[i]]) box.extend(v);
        centroids.extend((tris_[order_[i]][0] + tris_[order_[i]][1] + tris_[order_[i]][2]) / 3.0);
    }
    nodes_[index].box = box;
    if (end - begin <= kLeafSize) {
        nodes_[index].begin = begin;
        nodes_[index].end = end;
        return index;
    }
    int axis = 0;
    centroids.sizes().maxCoeff(&axis);
    const int mid = (begin + end) / 2;
    std::nth_element(order_.begin() + begin, order_.begin() + mid, order_.begin() + end, [&](int a, int b) {
        const double ca = tris_[a][0][axis] + tris_[a][1][axis] + tris_[a][2][axis];
        const double cb = tris_[b][0][axis] + tris_[b][1][axis] + tris_[b][2][axis];
        return ca < cb || (ca == cb && a < b);
    });
    const int left = build(begin, mid);
    const int right = build(mid, end);
    nodes_[index].left = left;
    nodes_[index].right = right;
    return index;
}

TriangleBvh::Nearest TriangleBvh::nearest(const Vec3& x) const {
    Nearest best;
    best.distance_sq = kInf;
    if (nodes_.empty()) return best;
    std::vector<int> stack{0};
    while (!stack.empty()) {
        const Node& node = nodes_[stack.back()];
        stack.pop_back();
        // Strict comparison keeps equal-distance subtrees so ties resolve by index.
        if (box_distance_sq(node.box, x) > best.distance_sq) continue;
        if (node.left < 0) {
            for (int i = node.begin; i < node.end; ++i) {
                const int f = order_[i];
                const Vec3 q = closest_point_on_triangle(x, tris_[f][0], tris_[f][1], tris_[f][2]);
                const double d = (q - x).squaredNorm();
                if (d < best.distance_sq || (d == best.distance_sq && f < best.face)) {
                    best.face = f;
                    best.distance_sq = d;
                    best.point = q;
                }
            }
            continue;
        }
        const double dl = box_distance_sq(nodes_[node.left].box, x);
        const double dr = box_distance_sq(nodes_[node.right].box, x);
        // Visit the nearer child first (pushed last).
        if (dl <= dr) {
            stack.push_back(node.right);
            stack.push_back(node.left);
        } else {
            stack.push_back(node.left);
            stack.push_back(node.right);
        }
    }
    return best;
}

std::optional<RayHit> TriangleBvh::intersect(const Vec3& origin, const Vec3& direction, double t_min,
                                             double t_max) const {
    if (nodes_.empty()) return std::nullopt;
    const Vec3 inv_dir = direction.cwiseInverse();
    RayHit best;
    best.t = t_max;
    std::vector<int> stack{0};
    while (!stack.empty()) {
        const Node& node = nodes_[stack.back()];
        stack.pop_back();
        if (ray_box(node.box, origin, inv_dir, t_min, best.t) == kInf) continue;
        if (node.left < 0) {
            for (int i = node.begin; i < node.end; ++i) {
                const int f = order_[i];
                const auto t = ray_triangle(origin, direction, tris_[f][0], tris_[f][1], tris_[f][2]);
                if (t && *t > t_min && (*t < best.t || (*t == best.t && f < best.face))) {
                    best.t = *t;
                    best.face = f;
                }
            }
            continue;
        }
        stack.push_back(node.left);
        stack.push_back(node.right);
    }
    if (best.face < 0) return std::nullopt;
    return best;
}

bool TriangleBvh::occluded(const Vec3& origin, const Vec3& direction, double t_min, double t_max) const {
    if (nodes_.empty()) return false;
    const Vec3 inv_dir = direction.cwiseInverse();
    std::vector<int> stack{0};
    while (!stack.empty()) {
        const Node& node = nodes_[stack.back()];
        stack.pop_back();
        if (ray_box(node.box, origin, inv_dir, t_min, t_max) == kInf) continue;
        if (node.left < 0) {
            for (int i = node.begin; i < node.end; ++i) {
                const int f = order_[i];
                const auto t = ray_triangle(origin, direction, tris_[f][0], tris_[f][1], tris_[f][2]);
                if (t && *t > t_min && *t < t_max) return true;
            }
            continue;
        }
        stack.push_back(node.left);
        stack.push_back(node.right);
    }
    return false;
}

}  // namespace camo
