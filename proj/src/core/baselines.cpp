#include "camo/baselines.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>

#include "camo/errors.hpp"
#include "camo/random.hpp"

namespace camo {

namespace {

std::vector<int> source_views(const Scene& scene, const BaselineOptions& options) {
    if (!options.views.empty()) return options.views;
    std::vector<int> v = scene.view_indices(ViewRole::train);
    if (v.empty()) throw ContractError("scene has no train views to take colors from");
    return v;
}

void finish(SurfaceTextureMap& tex, const BaselineContext& ctx, bool fill) {
    if (fill) neighbor_fill(tex, mean_image_color(ctx.scene, ctx.observations.views));
}

SurfaceTextureMap empty_texture(const BaselineContext& ctx) {
    SurfaceTextureMap tex;
    tex.sites = ctx.sites;
    tex.colors.assign(ctx.sites.size(), Rgb::Zero());
    tex.filled.assign(ctx.sites.size(), 0);
    return tex;
}

const BoxShape& require_atlas(const BaselineContext& ctx) {
    if (ctx.sites.layout != TextureLayout::cuboid_atlas)
        throw UnsupportedShapeError("MRF baselines need a cuboid mesh with an atlas texture");
    return ctx.sites.box;
}

}  // namespace

SurfaceSites make_sites(const Scene& scene, const Mesh& mesh, const Placement& placement, const TextureDomain& domain) {
    if (domain.table_view) return view_table_sites(scene, mesh, placement, *domain.table_view);
    const auto box = as_cuboid(mesh);
    if (!box) throw UnsupportedShapeError("non-cuboid mesh needs a view-table texture domain");
    return cuboid_atlas_sites(*box, domain.atlas_resolution);
}

BaselineContext::BaselineContext(const Scene& scene_, const Mesh& mesh_, const Placement& placement,
                                 const BaselineOptions& options)
    : scene(scene_),
      mesh(mesh_),
      object_to_world(camo::object_to_world(scene_, placement)),
      sites(make_sites(scene_, mesh_, placement, options.domain)) {
    observations = observe(scene, mesh, object_to_world, sites, source_views(scene, options));
}

SurfaceTextureMap mean_texture(const Scene& scene, const Mesh& mesh, const Placement& placement,
                               const BaselineOptions& options) {
    const BaselineContext ctx(scene, mesh, placement, options);
    const Observations& obs = ctx.observations;
    SurfaceTextureMap tex = empty_texture(ctx);
    for (int i = 0; i < obs.n_sites; ++i) {
        Eigen::Vector3d acc = Eigen::Vector3d::Zero();
        int n = 0;
        for (size_t v = 0; v < obs.views.size(); ++v) {
            const size_t k = obs.at(i, static_cast<int>(v));
            if (!obs.observed[k]) continue;
            acc += obs.colors[k].cast<double>();
            ++n;
        }
        if (n == 0) continue;
        tex.colors[i] = (acc / n).cast<float>();
        tex.filled[i] = 1;
    }
    finish(tex, ctx, options.fill_unobserved);
    return tex;
}

int direct_face_count(const CameraView& view, const Mesh& world_mesh, const TriangleBvh& world_bvh,
                      double max_angle_deg) {
    const double min_cos = std::cos(max_angle_deg * std::numbers::pi / 180.0);
    const Vec3 c = view.center();
    int count = 0;
    for (size_t f = 0; f < world_mesh.faces.size(); ++f) {
        const Vec3 x = world_mesh.centroid(f);
        const Vec3& n = world_mesh.face_normals[f];
        if (!site_visible(view, world_bvh, x, n)) continue;
        const Vec3 to_cam = (c - x).normalized();
        if (n.dot(to_cam) >= min_cos) ++count;
    }
    return count;
}

std::vector<int> greedy_view_order(const Scene& scene, const Mesh& mesh, const Placement& placement,
                                   const std::vector<int>& views) {
    const Mesh world = transformed(mesh, object_to_world(scene, placement));
    const TriangleBvh bvh(world);
    std::vector<std::pair<int, int>> scored;
    for (int v : views) scored.emplace_back(direct_face_count(scene.views[v], world, bvh), v);
    std::sort(scored.begin(), scored.end(), [&](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first > b.first;
        return scene.views[a.second].id < scene.views[b.second].id;
    });
    std::vector<int> order;
    for (const auto& s : scored) order.push_back(s.second);
    return order;
}

SurfaceTextureMap iterative_projection_ordered(const Scene& scene, const Mesh& mesh, const Placement& placement,
                                               const std::vector<int>& order, const BaselineOptions& options,
                                               std::vector<int>* fill_step) {
    BaselineOptions opts = options;
    opts.views = order;
    const BaselineContext ctx(scene, mesh, placement, opts);
    const Observations& obs = ctx.observations;
    SurfaceTextureMap tex = empty_texture(ctx);
    if (fill_step) fill_step->assign(ctx.sites.size(), -1);
    for (size_t v = 0; v < order.size(); ++v) {
        for (int i = 0; i < obs.n_sites; ++i) {
            const size_t k = obs.at(i, static_cast<int>(v));
            if (tex.filled[i] || !obs.observed[k]) continue;
            tex.colors[i] = obs.colors[k];
            tex.filled[i] = 1;
            if (fill_step) (*fill_step)[i] = static_cast<int>(v);
        }
    }
    finish(tex, ctx, options.fill_unobserved);
    return tex;
}

SurfaceTextureMap iterative_projection(const Scene& scene, const Mesh& mesh, const Placement& placement,
                                       ViewOrder order, Rng& rng, const BaselineOptions& options,
                                       std::vector<int>* fill_step) {
    std::vector<int> views = source_views(scene, options);
    if (order == ViewOrder::random)
        shuffle(views, rng);
    else
        views = greedy_view_order(scene, mesh, placement, views);
    return iterative_projection_ordered(scene, mesh, placement, views, options, fill_step);
}

SurfaceTextureMap pixel_wise_greedy(const Scene& scene, const Mesh& mesh, const Placement& placement,
                                    const BaselineOptions& options) {
    const BaselineContext ctx(scene, mesh, placement, options);
    const Observations& obs = ctx.observations;
    SurfaceTextureMap tex = empty_texture(ctx);
    for (int i = 0; i < obs.n_sites; ++i) {
        int best = -1;
        float best_f = -1.0f;
        for (size_t v = 0; v < obs.views.size(); ++v) {
            const size_t k = obs.at(i, static_cast<int>(v));
            if (obs.observed[k] && obs.frontality[k] > best_f) {
                best_f = obs.frontality[k];
                best = static_cast<int>(v);
            }
        }
        if (best < 0) continue;
        tex.colors[i] = obs.colors[obs.at(i, best)];
        tex.filled[i] = 1;
    }
    finish(tex, ctx, options.fill_unobserved);
    return tex;
}

LabelingProblem atlas_labeling_problem(const BaselineContext& ctx, double smoothness) {
    require_atlas(ctx);
    const Observations& obs = ctx.observations;
    const int L = static_cast<int>(obs.views.size());
    LabelingProblem pb;
    pb.n_nodes = obs.n_sites;
    pb.n_labels = L;
    pb.smoothness = smoothness;
    pb.unary.assign(static_cast<size_t>(pb.n_nodes) * L, 0.0);
    pb.features.assign(static_cast<size_t>(pb.n_nodes) * L, Rgb::Zero());
    for (int p = 0; p < pb.n_nodes; ++p) {
        int observers = 0;
        for (int j = 0; j < L; ++j) observers += obs.observed[obs.at(p, j)];
        for (int l = 0; l < L; ++l) {
            const size_t kl = obs.at(p, l);
            pb.features[static_cast<size_t>(p) * L + l] = obs.colors[kl];
            double u = 3.0 * observers + 3.0;
            if (obs.observed[kl]) {
                u = 0.0;
                for (int j = 0; j < L; ++j) {
                    const size_t kj = obs.at(p, j);
                    if (obs.observed[kj]) u += (obs.colors[kl] - obs.colors[kj]).cwiseAbs().cast<double>().sum();
                }
            }
            pb.unary[static_cast<size_t>(p) * L + l] = u;
        }
    }
    for (int p = 0; p < pb.n_nodes; ++p)
        for (int q : ctx.sites.neighbors[p])
            if (p < q) pb.edges.emplace_back(p, q);
    return pb;
}

SurfaceTextureMap texture_from_labels(const BaselineContext& ctx, const std::vector<int>& node_labels,
                                      bool fill_unobserved) {
    const Observations& obs = ctx.observations;
    SurfaceTextureMap tex = empty_texture(ctx);
    for (int p = 0; p < obs.n_sites; ++p) {
        const size_t k = obs.at(p, node_labels[p]);
        if (!obs.observed[k]) continue;
        tex.colors[p] = obs.colors[k];
        tex.filled[p] = 1;
    }
    finish(tex, ctx, fill_unobserved);
    return tex;
}

double face_labeling_energy(const LabelingProblem& problem, const SurfaceSites& sites,
                            const std::vector<int>& face_labels) {
    const int per_face = sites.resolution * sites.resolution;
    std::vector<int> nodes(problem.n_nodes);
    for (int p = 0; p < problem.n_nodes; ++p) nodes[p] = face_labels[p / per_face];
    return problem.energy(nodes);
}

MrfResult boundary_mrf(const Scene& scene, const Mesh& cuboid, const Placement& placement,
                       const BaselineOptions& options, const MrfOptions& mrf) {
    const BaselineContext ctx(scene, cuboid, placement, options);
    const LabelingProblem pb = atlas_labeling_problem(ctx, mrf.smoothness);
    const int L = pb.n_labels;
    const int per_face = ctx.sites.resolution * ctx.sites.resolution;

    std::array<std::vector<double>, 6> unary;
    for (auto& u : unary) u.assign(L, 0.0);
    for (int p = 0; p < pb.n_nodes; ++p)
        for (int l = 0; l < L; ++l) unary[p / per_face][l] += pb.unary_at(p, l);
    // seam[a][b][la * L + lb] for faces a < b
    std::array<std::array<std::vector<double>, 6>, 6> seam;
    for (const auto& [p, q] : pb.edges) {
        int fa = p / per_face, fb = q / per_face;
        if (fa == fb) continue;
        int p0 = p, q0 = q;
        if (fa > fb) {
            std::swap(fa, fb);
            std::swap(p0, q0);
        }
        auto& table = seam[fa][fb];
        if (table.empty()) table.assign(static_cast<size_t>(L) * L, 0.0);
        for (int la = 0; la < L; ++la)
            for (int lb = 0; lb < L; ++lb) table[static_cast<size_t>(la) * L + lb] += pb.pairwise(p0, q0, la, lb);
    }
    const auto energy = [&](const std::array<int, 6>& f) {
        double e = 0.0;
        for (int a = 0; a < 6; ++a) e += unary[a][f[a]];
        for (int a = 0; a < 6; ++a)
            for (int b = a + 1; b < 6; ++b)
                if (!seam[a][b].empty()) e += seam[a][b][static_cast<size_t>(f[a]) * L + f[b]];
        return e;
    };

    MrfResult r;
    r.views = ctx.observations.views;
    std::array<int, 6> best{};
    double best_e = std::numeric_limits<double>::infinity();
    if (std::pow(static_cast<double>(L), 6.0) <= mrf.exhaustive_limit) {
        r.exhaustive = true;
        std::array<int, 6> f{};
        while (true) {
            const double e = energy(f);
            if (e < best_e) {
                best_e = e;
                best = f;
            }
            int k = 0;
            while (k < 6 && ++f[k] == L) f[k++] = 0;
            if (k == 6) break;
        }
    } else {
        Rng rng(mrf.seed);
        for (int restart = 0; restart < mrf.restarts; ++restart) {
            std::array<int, 6> f;
            for (auto& x : f) x = static_cast<int>(uniform_index(rng, L));
            double e = energy(f);
            bool changed = true;
            while (changed) {
                changed = false;
                for (int a = 0; a < 6; ++a) {
                    for (int l = 0; l < L; ++l) {
                        std::array<int, 6> g = f;
                        g[a] = l;
                        const double eg = energy(g);
                        if (eg < e) {
                            e = eg;
                            f = g;
                            changed = true;
                        }
                    }
                }
            }
            if (e < best_e) {
                best_e = e;
                best = f;
            }
        }
    }
    r.labels.assign(best.begin(), best.end());
    r.energy = best_e;
    r.sweep_energies = {best_e};
    std::vector<int> nodes(pb.n_nodes);
    for (int p = 0; p < pb.n_nodes; ++p) nodes[p] = best[p / per_face];
    r.texture = texture_from_labels(ctx, nodes, options.fill_unobserved);
    return r;
}

MrfResult interior_mrf(const Scene& scene, const Mesh& cuboid, const Placement& placement,
                       const BaselineOptions& options, const MrfOptions& mrf) {
    const BaselineContext ctx(scene, cuboid, placement, options);
    const LabelingProblem pb = atlas_labeling_problem(ctx, mrf.smoothness);
    ExpansionResult ex = alpha_expansion(pb, unary_argmin(pb), mrf.max_sweeps);
    MrfResult r;
    r.views = ctx.observations.views;
    r.labels = std::move(ex.labels);
    r.energy = ex.energy;
    r.sweep_energies = std::move(ex.sweep_energies);
    r.texture = texture_from_labels(ctx, r.labels, options.fill_unobserved);
    return r;
}

BaselineMethod parse_baseline_method(const std::string& name) {
    if (name == "mean") return BaselineMethod::mean;
    if (name == "random") return BaselineMethod::random;
    if (name == "greedy") return BaselineMethod::greedy;
    if (name == "pixelgreedy") return BaselineMethod::pixelgreedy;
    if (name == "bmrf") return BaselineMethod::bmrf;
    if (name == "imrf") return BaselineMethod::imrf;
    throw ConfigError("unknown baseline method '" + name + "'");
}

const char* to_string(BaselineMethod method) {
    switch (method) {
        case BaselineMethod::mean: return "mean";
        case BaselineMethod::random: return "random";
        case BaselineMethod::greedy: return "greedy";
        case BaselineMethod::pixelgreedy: return "pixelgreedy";
        case BaselineMethod::bmrf: return "bmrf";
        case BaselineMethod::imrf: return "imrf";
    }
    return "?";
}

SurfaceTextureMap run_baseline(BaselineMethod method, const Scene& scene, const Mesh& mesh, const Placement& placement,
                               uint64_t seed, const BaselineOptions& options) {
    Rng rng(seed);
    MrfOptions mrf;
    mrf.seed = seed;
    switch (method) {
        case BaselineMethod::mean: return mean_texture(scene, mesh, placement, options);
        case BaselineMethod::random: return iterative_projection(scene, mesh, placement, ViewOrder::random, rng, options);
        case BaselineMethod::greedy: return iterative_projection(scene, mesh, placement, ViewOrder::greedy, rng, options);
        case BaselineMethod::pixelgreedy: return pixel_wise_greedy(scene, mesh, placement, options);
        case BaselineMethod::bmrf: return boundary_mrf(scene, mesh, placement, options, mrf).texture;
        case BaselineMethod::imrf: return interior_mrf(scene, mesh, placement, options, mrf).texture;
    }
    throw ConfigError("unknown baseline method");
}

}  // namespace camo
