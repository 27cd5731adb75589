#pragma once

#include <optional>
#include <vector>

#include <Eigen/Geometry>

#include "camo/mesh.hpp"

namespace camo {

struct RayHit {
    int face = -1;
    double t = 0.0;  // ray parameter: hit = origin + t * direction
};

/// Bounding-volume hierarchy over a mesh's triangles for nearest-face and
/// ray queries. Holds a copy of the triangles; the mesh may go away.
class TriangleBvh {
public:
    explicit TriangleBvh(const Mesh& mesh);

    struct Nearest {
        int face = -1;
        double distance_sq = 0.0;
        Vec3 point = Vec3::Zero();
    };

    /// Face minimizing point-to-triangle distance; ties go to the lowest index.
    Nearest nearest(const Vec3& x) const;

    /// Closest hit with t in (t_min, t_max).
    std::optional<RayHit> intersect(const Vec3& origin, const Vec3& direction, double t_min, double t_max) const;

    /// True when anything is hit with t in (t_min, t_max).
    bool occluded(const Vec3& origin, const Vec3& direction, double t_min, double t_max) const;

    const std::vector<Vec3>& face_normals() const { return normals_; }
    size_t face_count() const { return tris_.size(); }

private:
    struct Node {
        Eigen::AlignedBox3d box;
        int left = -1;   // child index, or -1 for a leaf
        int right = -1;
        int begin = 0;   // leaf range into order_
        int end = 0;
    };

    int build(int begin, int end);

    std::vector<std::array<Vec3, 3>> tris_;
    std::vector<Vec3> normals_;
    std::vector<int> order_;
    std::vector<Node> nodes_;
};

/// Moller-Trumbore; returns t for hits strictly in front of the origin.
std::optional<double> ray_triangle(const Vec3& origin, const Vec3& direction, const Vec3& a, const Vec3& b,
                                   const Vec3& c);

/// Closest point on triangle abc to p.
Vec3 closest_point_on_triangle(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c);

}  // namespace camo
