#pragma once

#include <optional>
#include <string>
#include <vector>

#include "camo/mrf.hpp"
#include "camo/surface_texture.hpp"

namespace camo {

/// Surface parameterization used by the classical methods. Cuboids use a
/// six-face atlas unless `table_view` is set; other meshes need `table_view`.
struct TextureDomain {
    int atlas_resolution = 256;
    std::optional<int> table_view;
};

struct BaselineOptions {
    TextureDomain domain;
    std::vector<int> views;       // source views; empty means every train view
    bool fill_unobserved = true;  // neighbor-fill sites no source view observes
};

/// Everything a baseline needs about one placed object.
struct BaselineContext {
    const Scene& scene;
    const Mesh& mesh;
    Similarity object_to_world;
    SurfaceSites sites;
    Observations observations;

    BaselineContext(const Scene& scene, const Mesh& mesh, const Placement& placement,
                    const BaselineOptions& options);
};

SurfaceSites make_sites(const Scene& scene, const Mesh& mesh, const Placement& placement, const TextureDomain& domain);

/// Per-site mean of the colors seen by every observing view.
SurfaceTextureMap mean_texture(const Scene& scene, const Mesh& mesh, const Placement& placement,
                               const BaselineOptions& options = {});

enum class ViewOrder { random, greedy };

/// Mesh faces seen head-on by a view: centroid visible and the angle between
/// the direction to the camera and the face normal at most `max_angle_deg`.
int direct_face_count(const CameraView& view, const Mesh& world_mesh, const TriangleBvh& world_bvh,
                      double max_angle_deg = 20.0);

/// Views sorted by direct_face_count, descending; ties by view id.
std::vector<int> greedy_view_order(const Scene& scene, const Mesh& mesh, const Placement& placement,
                                   const std::vector<int>& views);

/// Processes views in order; each view colors the still-unfilled sites it
/// observes with its background colors. `fill_step` (optional) receives, per
/// site, the position in the order of the view that colored it (-1 if none).
SurfaceTextureMap iterative_projection(const Scene& scene, const Mesh& mesh, const Placement& placement,
                                       ViewOrder order, Rng& rng, const BaselineOptions& options = {},
                                       std::vector<int>* fill_step = nullptr);

/// Same, with an explicit view order (scene view indices).
SurfaceTextureMap iterative_projection_ordered(const Scene& scene, const Mesh& mesh, const Placement& placement,
                                               const std::vector<int>& order, const BaselineOptions& options = {},
                                               std::vector<int>* fill_step = nullptr);

/// Per site, the color from the observing view with the most frontal view of
/// it; ties go to the earlier source view.
SurfaceTextureMap pixel_wise_greedy(const Scene& scene, const Mesh& mesh, const Placement& placement,
                                    const BaselineOptions& options = {});

struct MrfOptions {
    double smoothness = 1.0;
    int restarts = 20;             // coordinate-descent restarts when enumeration is too large
    double exhaustive_limit = 1e7; // enumerate all face labelings up to this count
    uint64_t seed = 0;
    int max_sweeps = 100;
};

struct MrfResult {
    std::vector<int> labels;           // per face (boundary) or per site (interior); index into `views`
    std::vector<int> views;            // label -> scene view index
    double energy = 0.0;
    std::vector<double> sweep_energies;
    bool exhaustive = false;
    SurfaceTextureMap texture;
};

/// Node energy of the cuboid atlas: labels are the source views, unary is the
/// summed L1 color error of a label's color against every observing view
/// (3 |observers| + 3 when the label does not observe the node), pairwise is
/// the seam cost of LabelingProblem.
LabelingProblem atlas_labeling_problem(const BaselineContext& context, double smoothness);

/// One label per box face.
MrfResult boundary_mrf(const Scene& scene, const Mesh& cuboid, const Placement& placement,
                       const BaselineOptions& options = {}, const MrfOptions& mrf = {});

/// One label per atlas node, optimized by alpha-expansion.
MrfResult interior_mrf(const Scene& scene, const Mesh& cuboid, const Placement& placement,
                       const BaselineOptions& options = {}, const MrfOptions& mrf = {});

/// Colors a texture from a node labeling: each node takes its label's color
/// when that view observes it, otherwise it is neighbor-filled.
SurfaceTextureMap texture_from_labels(const BaselineContext& context, const std::vector<int>& node_labels,
                                      bool fill_unobserved = true);

/// Energy of a per-face labeling, expanded to nodes.
double face_labeling_energy(const LabelingProblem& problem, const SurfaceSites& sites, const std::vector<int>& face_labels);

/// Names accepted by the CLI: mean, random, greedy, pixelgreedy, bmrf, imrf.
enum class BaselineMethod { mean, random, greedy, pixelgreedy, bmrf, imrf };
BaselineMethod parse_baseline_method(const std::string& name);
const char* to_string(BaselineMethod method);

SurfaceTextureMap run_baseline(BaselineMethod method, const Scene& scene, const Mesh& mesh, const Placement& placement,
                               uint64_t seed, const BaselineOptions& options = {});

}  // namespace camo
