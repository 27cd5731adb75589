#include "camo/surface_texture.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>

#include "camo/errors.hpp"

namespace camo {

BoxFace box_face(int k) {
    const int axis = k / 2;
    const int sign = (k % 2 == 0) ? 1 : -1;
    const int u = axis == 0 ? 1 : 0;
    const int v = axis == 2 ? 1 : 2;
    return {axis, sign, u, v};
}

SurfaceSites cuboid_atlas_sites(const BoxShape& box, int resolution) {
    if (resolution < 1) throw DomainError("atlas resolution must be >= 1");
    SurfaceSites s;
    s.layout = TextureLayout::cuboid_atlas;
    s.resolution = resolution;
    s.box = box;
    const int n = 6 * resolution * resolution;
    s.points.resize(n);
    s.normals.resize(n);
    s.neighbors.assign(n, {});
    const Vec3 size = box.max - box.min;
    for (int k = 0; k < 6; ++k) {
        const BoxFace f = box_face(k);
        for (int j = 0; j < resolution; ++j) {
            for (int i = 0; i < resolution; ++i) {
                const int id = atlas_site(resolution, k, i, j);
                Vec3 p;
                p[f.axis] = f.sign > 0 ? box.max[f.axis] : box.min[f.axis];
                p[f.u_axis] = box.min[f.u_axis] + (i + 0.5) / resolution * size[f.u_axis];
                p[f.v_axis] = box.min[f.v_axis] + (j + 0.5) / resolution * size[f.v_axis];
                s.points[id] = p;
                Vec3 nrm = Vec3::Zero();
                nrm[f.axis] = f.sign;
                s.normals[id] = nrm;
                if (i > 0) s.neighbors[id].push_back(atlas_site(resolution, k, i - 1, j));
                if (i + 1 < resolution) s.neighbors[id].push_back(atlas_site(resolution, k, i + 1, j));
                if (j > 0) s.neighbors[id].push_back(atlas_site(resolution, k, i, j - 1));
                if (j + 1 < resolution) s.neighbors[id].push_back(atlas_site(resolution, k, i, j + 1));
            }
        }
    }
    // Links across the twelve shared box edges.
    const auto border_site = [resolution](int face, int across_axis, int across_sign, int along) {
        const BoxFace f = box_face(face);
        const int border = across_sign > 0 ? resolution - 1 : 0;
        return f.u_axis == across_axis ? atlas_site(resolution, face, border, along)
                                       : atlas_site(resolution, face, along, border);
    };
    for (int a = 0; a < 6; ++a) {
        for (int b = a + 1; b < 6; ++b) {
            const BoxFace fa = box_face(a), fb = box_face(b);
            if (fa.axis == fb.axis) continue;
            for (int k = 0; k < resolution; ++k) {
                const int sa = border_site(a, fb.axis, fb.sign, k);
                const int sb = border_site(b, fa.axis, fa.sign, k);
                s.neighbors[sa].push_back(sb);
                s.neighbors[sb].push_back(sa);
            }
        }
    }
    return s;
}

SurfaceSites view_table_sites(const Scene& scene, const Mesh& mesh, const Placement& placement, int view_index) {
    const CameraView& view = scene.views.at(view_index);
    const Similarity tf = object_to_world(scene, placement);
    const DepthMap depth = render_depth(mesh, tf, view, view.height(), view.width());
    const SurfacePoints pts = visible_surface_points(depth, view);
    const TriangleBvh bvh(mesh);
    SurfaceSites s;
    s.layout = TextureLayout::view_table;
    s.view_index = view_index;
    s.table_height = view.height();
    s.table_width = view.width();
    s.pixels = pts.pixels;
    std::vector<int> lookup(static_cast<size_t>(view.height()) * view.width(), -1);
    for (size_t i = 0; i < pts.size(); ++i) {
        const Vec3 xo = tf.inverse_apply(pts.world[i]);
        s.points.push_back(xo);
        s.normals.push_back(nearest_face_normal(bvh, xo));
        lookup[static_cast<size_t>(pts.pixels[i].y) * view.width() + pts.pixels[i].x] = static_cast<int>(i);
    }
    s.neighbors.assign(pts.size(), {});
    for (size_t i = 0; i < pts.size(); ++i) {
        const auto [x, y] = pts.pixels[i];
        const int offsets[4][2] = {{-1, 0}, {1, 0}, {0, -1}, {0, 1}};
        for (const auto& o : offsets) {
            const int nx = x + o[0], ny = y + o[1];
            if (nx < 0 || ny < 0 || nx >= view.width() || ny >= view.height()) continue;
            const int nb = lookup[static_cast<size_t>(ny) * view.width() + nx];
            if (nb >= 0) s.neighbors[i].push_back(nb);
        }
    }
    return s;
}

bool SurfaceTextureMap::complete() const {
    return std::all_of(filled.begin(), filled.end(), [](uint8_t f) { return f != 0; });
}

bool site_visible(const CameraView& view, const TriangleBvh& world_bvh, const Vec3& world_point,
                  const Vec3& world_normal) {
    const Vec3 cam = view.R * world_point + view.t;
    if (cam.z() <= kMinDepth) return false;
    const Vec3 h = view.K * cam;
    const double u = h.x() / h.z(), v = h.y() / h.z();
    if (u < 0.0 || v < 0.0 || u >= view.width() || v >= view.height()) return false;
    const Vec3 c = view.center();
    if (world_normal.dot(c - world_point) <= 0.0) return false;
    // Segment camera -> point; stop short of the point so its own face does not count.
    return !world_bvh.occluded(c, world_point - c, 1e-9, 1.0 - 1e-4);
}

Observations observe(const Scene& scene, const Mesh& mesh, const Similarity& object_to_world,
                     const SurfaceSites& sites, const std::vector<int>& views) {
    Observations obs;
    obs.n_sites = static_cast<int>(sites.size());
    obs.views = views;
    const size_t total = sites.size() * views.size();
    obs.observed.assign(total, 0);
    obs.colors.assign(total, Rgb::Zero());
    obs.frontality.assign(total, 0.0f);
    const Mesh world = transformed(mesh, object_to_world);
    const TriangleBvh bvh(world);
    for (size_t i = 0; i < sites.size(); ++i) {
        const Vec3 xw = object_to_world.apply(sites.points[i]);
        const Vec3 nw = object_to_world.apply_direction(sites.normals[i]);
        for (size_t v = 0; v < views.size(); ++v) {
            const CameraView& view = scene.views[views[v]];
            const size_t k = i * views.size() + v;
            const Vec3 cam = view.R * xw + view.t;
            if (cam.z() <= kMinDepth) continue;
            const Vec3 h = view.K * cam;
            obs.colors[k] = sample_bilinear(view.image, h.x() / h.z(), h.y() / h.z());
            if (!site_visible(view, bvh, xw, nw)) continue;
            obs.observed[k] = 1;
            const Vec3 ray = view.center() - xw;
            obs.frontality[k] = static_cast<float>(std::abs(nw.dot(ray)) / ray.norm());
        }
    }
    return obs;
}

void neighbor_fill(SurfaceTextureMap& texture, const Rgb& fallback) {
    const size_t n = texture.colors.size();
    std::deque<int> queue;
    std::vector<uint8_t> reached(texture.filled);
    for (size_t i = 0; i < n; ++i)
        if (texture.filled[i]) queue.push_back(static_cast<int>(i));
    while (!queue.empty()) {
        const int s = queue.front();
        queue.pop_front();
        for (int nb : texture.sites.neighbors[s]) {
            if (reached[nb]) continue;
            reached[nb] = 1;
            texture.colors[nb] = texture.colors[s];
            queue.push_back(nb);
        }
    }
    for (size_t i = 0; i < n; ++i) {
        if (!reached[i]) texture.colors[i] = fallback;
        texture.filled[i] = 1;
    }
}

Rgb mean_image_color(const Scene& scene, const std::vector<int>& views) {
    Eigen::Vector3d acc = Eigen::Vector3d::Zero();
    size_t count = 0;
    for (int v : views) {
        const Image& img = scene.views[v].image;
        for (size_t i = 0; i < img.data.size(); i += 3) {
            acc += Eigen::Vector3d(img.data[i], img.data[i + 1], img.data[i + 2]);
            ++count;
        }
    }
    return count == 0 ? Rgb(0.5f, 0.5f, 0.5f) : Rgb((acc / static_cast<double>(count)).cast<float>());
}

Rgb sample_atlas(const SurfaceTextureMap& texture, const Vec3& p) {
    const SurfaceSites& s = texture.sites;
    const BoxShape& box = s.box;
    int best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (int k = 0; k < 6; ++k) {
        const BoxFace f = box_face(k);
        const double plane = f.sign > 0 ? box.max[f.axis] : box.min[f.axis];
        const double d = std::abs(p[f.axis] - plane);
        if (d < best_d) {
            best_d = d;
            best = k;
        }
    }
    const BoxFace f = box_face(best);
    const int res = s.resolution;
    const Vec3 size = box.max - box.min;
    const double fu = std::clamp((p[f.u_axis] - box.min[f.u_axis]) / size[f.u_axis] * res - 0.5, 0.0, res - 1.0);
    const double fv = std::clamp((p[f.v_axis] - box.min[f.v_axis]) / size[f.v_axis] * res - 0.5, 0.0, res - 1.0);
    const int i0 = static_cast<int>(std::floor(fu)), j0 = static_cast<int>(std::floor(fv));
    const int i1 = std::min(i0 + 1, res - 1), j1 = std::min(j0 + 1, res - 1);
    const float a = static_cast<float>(fu - i0), b = static_cast<float>(fv - j0);
    const auto c = [&](int i, int j) { return texture.colors[atlas_site(res, best, i, j)]; };
    return (1 - b) * ((1 - a) * c(i0, j0) + a * c(i1, j0)) + b * ((1 - a) * c(i0, j1) + a * c(i1, j1));
}

Composite render_texture(const CameraView& view, const Mesh& mesh, const Similarity& object_to_world,
                         const SurfaceTextureMap& texture) {
    Composite out;
    out.depth = render_depth(mesh, object_to_world, view, view.height(), view.width());
    out.mask = out.depth.mask;
    out.image = view.image;
    const SurfaceSites& s = texture.sites;
    std::vector<int> lookup;
    if (s.layout == TextureLayout::view_table) {
        if (s.table_height != view.height() || s.table_width != view.width())
            throw ContractError("view-table texture rendered into a view of a different size");
        lookup.assign(static_cast<size_t>(view.height()) * view.width(), -1);
        for (size_t i = 0; i < s.pixels.size(); ++i)
            lookup[static_cast<size_t>(s.pixels[i].y) * view.width() + s.pixels[i].x] = static_cast<int>(i);
    }
    for (int y = 0; y < view.height(); ++y) {
        for (int x = 0; x < view.width(); ++x) {
            if (!out.mask.at(y, x)) continue;
            if (s.layout == TextureLayout::cuboid_atlas) {
                const Vec3 xw = unproject(Vec2(x + 0.5, y + 0.5), out.depth.at(y, x), view);
                out.image.set_pixel(y, x, sample_atlas(texture, object_to_world.inverse_apply(xw)));
            } else {
                const int site = lookup[static_cast<size_t>(y) * view.width() + x];
                if (site < 0) throw ContractError("view-table texture does not cover the rendered object");
                out.image.set_pixel(y, x, texture.colors[site]);
            }
        }
    }
    return out;
}

}  // namespace camo
