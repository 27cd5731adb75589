#include "camo/neural/neural_method.hpp"

#include <algorithm>
#include <limits>

#include "camo/errors.hpp"
#include "camo/neural/tensor_bridge.hpp"

namespace camo {

namespace {

Scene at_model_size(const Scene& scene, const NeuralTexture& net) {
    return resize_scene(scene, net->config().height, net->config().width);
}

std::vector<const CameraView*> pointers(const Scene& scene, const std::vector<int>& ids) {
    std::vector<const CameraView*> out;
    for (int v : ids) out.push_back(&scene.views.at(v));
    return out;
}

}  // namespace

std::vector<int> conditioning_views(const Scene& scene, int n) {
    const std::vector<int> train = scene.view_indices(ViewRole::train);
    if (n < 1 || n > static_cast<int>(train.size()))
        throw ConfigError("cannot pick " + std::to_string(n) + " conditioning views from " +
                          std::to_string(train.size()) + " train views");
    std::vector<int> chosen = {train.front()};
    std::vector<double> dist(train.size(), std::numeric_limits<double>::infinity());
    while (static_cast<int>(chosen.size()) < n) {
        const Vec3 c = scene.views[chosen.back()].center();
        int best = -1;
        for (size_t k = 0; k < train.size(); ++k) {
            dist[k] = std::min(dist[k], (scene.views[train[k]].center() - c).norm());
            if (dist[k] > 0.0 && (best < 0 || dist[k] > dist[best])) best = static_cast<int>(k);
        }
        if (best < 0) break;
        chosen.push_back(train[best]);
        dist[best] = 0.0;
    }
    return chosen;
}

NeuralComposite render_neural(NeuralTexture& net, const Scene& scene, const Mesh& mesh, const Placement& placement,
                              int view, const std::vector<int>& conditioning) {
    if (std::find(conditioning.begin(), conditioning.end(), view) != conditioning.end())
        throw ContractError("the rendered view must not be a conditioning view");
    torch::NoGradGuard guard;
    net->eval();
    const Scene s = at_model_size(scene, net);
    const PlacedObject object(mesh, object_to_world(s, placement));
    const Conditioning cond = encode_conditioning(net, pointers(s, conditioning));
    const NeuralRender r = render_object(net, cond, object, s.views.at(view));
    return {tensor_to_image(r.composite), r.mask, r.empty};
}

SurfaceTextureMap neural_texture_map(NeuralTexture& net, const Scene& scene, const Mesh& mesh,
                                     const Placement& placement, const std::vector<int>& conditioning,
                                     const TextureDomain& domain) {
    torch::NoGradGuard guard;
    net->eval();
    const Scene s = at_model_size(scene, net);
    SurfaceTextureMap tex;
    tex.sites = make_sites(s, mesh, placement, domain);
    const Similarity t = object_to_world(s, placement);
    const PlacedObject object(mesh, t);
    const Conditioning cond = encode_conditioning(net, pointers(s, conditioning));
    std::vector<Vec3> world;
    world.reserve(tex.sites.size());
    for (const auto& p : tex.sites.points) world.push_back(t.apply(p));
    const auto colors = texture_colors(net, cond, object, world).contiguous();
    const auto a = colors.accessor<float, 2>();
    tex.colors.resize(world.size());
    tex.filled.assign(world.size(), 1);
    for (size_t i = 0; i < world.size(); ++i) tex.colors[i] = Rgb(a[i][0], a[i][1], a[i][2]);
    return tex;
}

}  // namespace camo
