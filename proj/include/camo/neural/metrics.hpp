#pragma once

#include <string>

#include "camo/evalkit.hpp"
#include "camo/neural/feature_nets.hpp"
#include "camo/scene.hpp"

namespace camo {

struct MetricSuiteConfig {
    FeatureNetConfig perceptual{1.0, 2, {}};
    FeatureNetConfig sifid{1.0, 3, {}};
};

/// Perceptual distance and single-image Frechet distance on object-centered
/// crops of composites in reserved test views.
class MetricSuite {
public:
    explicit MetricSuite(const MetricSuiteConfig& config = {});

    double perceptual(const Image& a, const Image& b) { return perceptual_.distance(a, b); }
    double sifid(const Image& a, const Image& b) { return sifid_.distance(a, b); }

    /// Scores a composite of `method` in scene.views[view]. Throws
    /// ContractError unless the view is a test view, ShapeError when the
    /// composite does not match the view image size, DomainError on an empty
    /// mask.
    MetricRecord evaluate(const Scene& scene, int view, const Image& composite, const Mask& mask,
                          const std::string& method);

private:
    PerceptualMetric perceptual_;
    SifidMetric sifid_;
};

}  // namespace camo
