#pragma once

#include <vector>

#include "camo/baselines.hpp"
#include "camo/neural/texture_net.hpp"

namespace camo {

/// n train views spread around the scene: farthest-point sampling on the
/// camera centers, starting from the lowest-index train view. Ties go to the
/// lower index.
std::vector<int> conditioning_views(const Scene& scene, int n);

struct NeuralComposite {
    Image image;
    Mask mask;
    bool empty = false;
};

/// Renders the object into scene.views[view] with the texture conditioned on
/// `conditioning`. The scene is brought to the model's resolution first.
/// Throws ContractError when the rendered view is one of the conditioning
/// views.
NeuralComposite render_neural(NeuralTexture& net, const Scene& scene, const Mesh& mesh, const Placement& placement,
                              int view, const std::vector<int>& conditioning);

/// Evaluates the texture at every surface site (atlas texels for cuboids,
/// visible pixels of domain.table_view otherwise).
SurfaceTextureMap neural_texture_map(NeuralTexture& net, const Scene& scene, const Mesh& mesh,
                                     const Placement& placement, const std::vector<int>& conditioning,
                                     const TextureDomain& domain = {});

}  // namespace camo
