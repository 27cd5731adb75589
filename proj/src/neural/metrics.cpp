#include "camo/neural/metrics.hpp"

#include "camo/errors.hpp"

namespace camo {

MetricSuite::MetricSuite(const MetricSuiteConfig& config) : perceptual_(config.perceptual), sifid_(config.sifid) {}

MetricRecord MetricSuite::evaluate(const Scene& scene, int view, const Image& composite, const Mask& mask,
                                   const std::string& method) {
    const CameraView& v = scene.views.at(view);
    if (v.role != ViewRole::test) throw ContractError("metrics are computed on reserved test views only ('" + v.id + "' is a train view)");
    if (composite.height != v.height() || composite.width != v.width())
        throw ShapeError("composite size does not match view '" + v.id + "'");
    const EvalCrop crop = extract_eval_crop(composite, v.image, mask);
    MetricRecord r;
    r.scene = scene.name;
    r.view = v.id;
    r.method = method;
    r.perceptual = perceptual_.distance(crop.rendered, crop.background);
    r.sifid = sifid_.distance(crop.rendered, crop.background);
    return r;
}

}  // namespace camo
