#pragma once

#include <optional>
#include <vector>

#include "camo/bvh.hpp"
#include "camo/geometry.hpp"
#include "camo/mesh.hpp"
#include "camo/scene.hpp"

namespace camo {

enum class TextureLayout { cuboid_atlas, view_table };

/// Where colors live on the surface: texel centers of a six-face atlas for
/// cuboids, or the visible points of one render view for arbitrary meshes.
/// `neighbors` is the surface adjacency (grid within a face plus links across
/// shared box edges; 4-neighborhood of pixels for view tables).
struct SurfaceSites {
    TextureLayout layout = TextureLayout::cuboid_atlas;
    std::vector<Vec3> points;   // object space
    std::vector<Vec3> normals;  // object space
    std::vector<std::vector<int>> neighbors;

    // cuboid_atlas
    int resolution = 0;
    BoxShape box{};

    // view_table
    int view_index = -1;
    std::vector<PixelCoord> pixels;
    int table_height = 0;
    int table_width = 0;

    size_t size() const { return points.size(); }
};

/// Box face k (order +x, -x, +y, -y, +z, -z): normal axis, sign, and the two
/// in-face axes in increasing order.
struct BoxFace {
    int axis;
    int sign;
    int u_axis;
    int v_axis;
};
BoxFace box_face(int k);

/// Site index of texel (i along u_axis, j along v_axis) on box face k.
inline int atlas_site(int resolution, int face, int i, int j) {
    return (face * resolution + j) * resolution + i;
}

SurfaceSites cuboid_atlas_sites(const BoxShape& box, int resolution);

/// Visible points of the placed mesh in scene.views[view_index].
SurfaceSites view_table_sites(const Scene& scene, const Mesh& mesh, const Placement& placement, int view_index);

/// Colors assigned to every site; `filled` false marks sites still waiting
/// for neighbor fill.
struct SurfaceTextureMap {
    SurfaceSites sites;
    std::vector<Rgb> colors;
    std::vector<uint8_t> filled;

    bool complete() const;
};

/// What one view sees of every site.
struct Observations {
    int n_sites = 0;
    std::vector<int> views;           // scene view indices, in label order
    std::vector<uint8_t> observed;    // [site * n_views + v]
    std::vector<Rgb> colors;          // bilinear background sample at the projection
    std::vector<float> frontality;    // |cos| between viewing ray and normal

    size_t at(int site, int v) const { return static_cast<size_t>(site) * views.size() + v; }
};

/// A site is observed by a view when it lies in front of the camera, projects
/// inside the image, faces the camera, and the segment to the camera center
/// hits no triangle of the placed mesh.
bool site_visible(const CameraView& view, const TriangleBvh& world_bvh, const Vec3& world_point,
                  const Vec3& world_normal);

Observations observe(const Scene& scene, const Mesh& mesh, const Similarity& object_to_world,
                     const SurfaceSites& sites, const std::vector<int>& views);

/// Gives every unfilled site the color of the nearest filled site in the
/// surface adjacency (breadth-first). Components with nothing filled take
/// `fallback`.
void neighbor_fill(SurfaceTextureMap& texture, const Rgb& fallback);

/// Mean color of the given views' images.
Rgb mean_image_color(const Scene& scene, const std::vector<int>& views);

/// Composites the textured object into `view`'s image. Pixels outside the
/// object mask are bit-equal to the background.
struct Composite {
    Image image;
    Mask mask;
    DepthMap depth;
};
Composite render_texture(const CameraView& view, const Mesh& mesh, const Similarity& object_to_world,
                         const SurfaceTextureMap& texture);

/// Texture color at an object-space surface point of a cuboid atlas
/// (bilinear within the face, clamped at its border).
Rgb sample_atlas(const SurfaceTextureMap& texture, const Vec3& object_point);

}  // namespace camo
