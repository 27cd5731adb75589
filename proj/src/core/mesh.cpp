#include "camo/mesh.hpp"

#include <algorithm>
#include <fstream>
#include <limits>
#include <sstream>

#include <Eigen/Geometry>

#include "camo/errors.hpp"

namespace camo {

Vec3 Mesh::centroid(size_t f) const {
    const auto [a, b, c] = triangle(f);
    return (a + b + c) / 3.0;
}

Vec3 Mesh::bbox_min() const {
    Vec3 m = Vec3::Constant(std::numeric_limits<double>::infinity());
    for (const auto& v : vertices) m = m.cwiseMin(v);
    return m;
}

Vec3 Mesh::bbox_max() const {
    Vec3 m = Vec3::Constant(-std::numeric_limits<double>::infinity());
    for (const auto& v : vertices) m = m.cwiseMax(v);
    return m;
}

Mesh make_mesh(std::vector<Vec3> vertices, std::vector<Face> faces, bool open) {
    Mesh m;
    m.vertices = std::move(vertices);
    m.faces = std::move(faces);
    m.open = open;
    const int nv = static_cast<int>(m.vertices.size());
    m.face_normals.reserve(m.faces.size());
    for (size_t f = 0; f < m.faces.size(); ++f) {
        for (int idx : m.faces[f])
            if (idx < 0 || idx >= nv)
                throw ValidationError("face " + std::to_string(f) + " references vertex " + std::to_string(idx) +
                                      " outside [0, " + std::to_string(nv) + ")");
        const auto [a, b, c] = m.triangle(f);
        const Vec3 n = (b - a).cross(c - a);
        if (!(n.norm() > 0.0)) throw ValidationError("face " + std::to_string(f) + " is degenerate");
        m.face_normals.push_back(n.normalized());
    }
    return m;
}

Mesh make_cuboid() {
    std::vector<Vec3> v;
    for (int i = 0; i < 8; ++i)
        v.emplace_back((i & 1) ? 0.5 : -0.5, (i & 2) ? 0.5 : -0.5, (i & 4) ? 1.0 : 0.0);
    // Corner index bits: 1 -> +x, 2 -> +y, 4 -> +z. Windings are outward.
    std::vector<Face> f = {
        {1, 3, 7}, {1, 7, 5},  // +x
        {0, 4, 6}, {0, 6, 2},  // -x
        {2, 6, 7}, {2, 7, 3},  // +y
        {0, 1, 5}, {0, 5, 4},  // -y
        {4, 5, 7}, {4, 7, 6},  // +z
        {0, 2, 3}, {0, 3, 1},  // -z
    };
    return make_mesh(std::move(v), std::move(f));
}

Mesh normalize_to_object_space(const Mesh& mesh) {
    const Vec3 lo = mesh.bbox_min();
    const Vec3 hi = mesh.bbox_max();
    const double extent = (hi - lo).maxCoeff();
    if (!(extent > 0.0)) throw ValidationError("mesh has an empty bounding box");
    const Vec3 shift(0.5 * (lo.x() + hi.x()), 0.5 * (lo.y() + hi.y()), lo.z());
    std::vector<Vec3> verts;
    verts.reserve(mesh.vertices.size());
    for (const auto& p : mesh.vertices) verts.push_back((p - shift) / extent);
    return make_mesh(std::move(verts), mesh.faces, mesh.open);
}

Mesh load_obj(const std::filesystem::path& path, const ObjOptions& options) {
    std::ifstream in(path);
    if (!in) throw IngestError("missing mesh file: " + path.string());
    std::vector<Vec3> verts;
    std::vector<Face> faces;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::istringstream ls(line);
        std::string tag;
        if (!(ls >> tag)) continue;
        if (tag == "v") {
            Vec3 p;
            if (!(ls >> p.x() >> p.y() >> p.z())) throw IngestError(path.string() + ":" + std::to_string(line_no) + ": bad vertex");
            if (options.up == UpAxis::y) p = Vec3(p.x(), -p.z(), p.y());
            verts.push_back(p);
        } else if (tag == "f") {
            std::vector<int> poly;
            std::string tok;
            while (ls >> tok) {
                int idx = std::stoi(tok.substr(0, tok.find('/')));
                idx = idx < 0 ? static_cast<int>(verts.size()) + idx : idx - 1;
                poly.push_back(idx);
            }
            if (poly.size() < 3) throw IngestError(path.string() + ":" + std::to_string(line_no) + ": face with < 3 vertices");
            for (size_t k = 1; k + 1 < poly.size(); ++k) faces.push_back({poly[0], poly[k], poly[k + 1]});
        }
    }
    // Drop zero-area triangles produced by sloppy exporters.
    std::vector<Face> kept;
    for (const auto& f : faces) {
        const int nv = static_cast<int>(verts.size());
        if (f[0] < 0 || f[1] < 0 || f[2] < 0 || f[0] >= nv || f[1] >= nv || f[2] >= nv) {
            kept.push_back(f);  // make_mesh reports the bad index
            continue;
        }
        if ((verts[f[1]] - verts[f[0]]).cross(verts[f[2]] - verts[f[0]]).norm() > 0.0) kept.push_back(f);
    }
    Mesh m = make_mesh(std::move(verts), std::move(kept), options.open);
    return options.normalize ? normalize_to_object_space(m) : m;
}

void save_obj(const std::filesystem::path& path, const Mesh& mesh) {
    std::ofstream out(path);
    out.precision(17);
    for (const auto& v : mesh.vertices) out << "v " << v.x() << ' ' << v.y() << ' ' << v.z() << '\n';
    for (const auto& f : mesh.faces) out << "f " << f[0] + 1 << ' ' << f[1] + 1 << ' ' << f[2] + 1 << '\n';
}

Mesh transformed(const Mesh& mesh, const Similarity& transform) {
    Mesh out;
    out.vertices.reserve(mesh.vertices.size());
    for (const auto& v : mesh.vertices) out.vertices.push_back(transform.apply(v));
    out.faces = mesh.faces;
    out.face_normals.reserve(mesh.face_normals.size());
    for (const auto& n : mesh.face_normals) out.face_normals.push_back(transform.apply_direction(n));
    out.open = mesh.open;
    return out;
}

std::optional<BoxShape> as_cuboid(const Mesh& mesh, double tol) {
    if (mesh.faces.empty()) return std::nullopt;
    const BoxShape box{mesh.bbox_min(), mesh.bbox_max()};
    if (((box.max - box.min).array() <= tol).any()) return std::nullopt;
    for (size_t f = 0; f < mesh.faces.size(); ++f) {
        const auto tri = mesh.triangle(f);
        bool on_side = false;
        for (int axis = 0; axis < 3 && !on_side; ++axis) {
            for (double plane : {box.min[axis], box.max[axis]}) {
                if (std::all_of(tri.begin(), tri.end(), [&](const Vec3& p) { return std::abs(p[axis] - plane) <= tol; })) {
                    on_side = true;
                    break;
                }
            }
        }
        if (!on_side) return std::nullopt;
    }
    return box;
}

}  // namespace camo
