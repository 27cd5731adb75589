#pragma once

#include <array>
#include <filesystem>
#include <optional>
#include <vector>

#include "camo/camera.hpp"
#include "camo/scene.hpp"

namespace camo {

using Face = std::array<int, 3>;

/// Triangle mesh in object space. Object space is z-up with the base of the
/// bounding box on z = 0 and the largest bounding-box side equal to 1.
struct Mesh {
    std::vector<Vec3> vertices;
    std::vector<Face> faces;
    std::vector<Vec3> face_normals;
    bool open = false;  // not watertight

    size_t face_count() const { return faces.size(); }
    std::array<Vec3, 3> triangle(size_t f) const {
        return {vertices[faces[f][0]], vertices[faces[f][1]], vertices[faces[f][2]]};
    }
    Vec3 centroid(size_t f) const;
    Vec3 bbox_min() const;
    Vec3 bbox_max() const;
};

/// Builds a mesh, computes unit face normals (right-hand winding) and checks
/// index ranges. Degenerate (zero-area) faces are rejected.
Mesh make_mesh(std::vector<Vec3> vertices, std::vector<Face> faces, bool open = false);

/// Cube [-0.5, 0.5]^2 x [0, 1], 12 outward-facing triangles. Triangles
/// 2k and 2k+1 form box face k in the order +x, -x, +y, -y, +z, -z.
Mesh make_cuboid();

enum class UpAxis { y, z };

struct ObjOptions {
    UpAxis up = UpAxis::y;
    bool normalize = true;
    bool open = false;
};

/// Reads a Wavefront OBJ (polygons fan-triangulated) and, by default,
/// normalizes it into object space.
Mesh load_obj(const std::filesystem::path& path, const ObjOptions& options = {});
void save_obj(const std::filesystem::path& path, const Mesh& mesh);

/// Recenters and rescales into object space (see Mesh).
Mesh normalize_to_object_space(const Mesh& mesh);

Mesh transformed(const Mesh& mesh, const Similarity& transform);

/// Axis-aligned box description when the mesh is a cuboid whose triangles
/// all lie on the six box faces.
struct BoxShape {
    Vec3 min;
    Vec3 max;
};
std::optional<BoxShape> as_cuboid(const Mesh& mesh, double tol = 1e-9);

}  // namespace camo
