#pragma once

#include <filesystem>
#include <vector>

#include <torch/torch.h>

#include "camo/image.hpp"

namespace camo {

/// Weights of the frozen feature networks come from a fixed-seed Kaiming
/// initialization unless a weights file (checkpoint format) is supplied.
struct FeatureNetConfig {
    double width = 1.0;
    uint64_t seed = 1;
    std::filesystem::path weights;
};

/// VGG-16 convolutional layout. forward() returns the activations after the
/// first four max-pool stages; relu_taps() the relu1_2 ... relu5_3 outputs.
class VggFeaturesImpl : public torch::nn::Module {
public:
    explicit VggFeaturesImpl(FeatureNetConfig config = {});
    std::vector<torch::Tensor> forward(const torch::Tensor& images);
    std::vector<torch::Tensor> relu_taps(const torch::Tensor& images);

private:
    std::vector<torch::Tensor> run(const torch::Tensor& images, bool pools);
    std::vector<torch::nn::Conv2d> convs_;
};
TORCH_MODULE(VggFeatures);

/// Learned-perceptual-style distance: channel-normalized activations of five
/// VGG stages, squared differences summed over channels, averaged over space
/// and summed over stages.
class PerceptualMetric {
public:
    explicit PerceptualMetric(FeatureNetConfig config = {.width = 1.0, .seed = 2, .weights = {}});
    double distance(const Image& a, const Image& b);
    torch::Tensor distance(const torch::Tensor& a, const torch::Tensor& b);  // [B,3,H,W] -> [B]

private:
    VggFeatures net_;
};

inline constexpr int kSifidMinSize = 8;

/// Single-image Frechet distance between the per-position feature
/// statistics of two images. The extractor uses stride-1 convolutions with
/// left-right symmetric kernels, so mirroring both images leaves the score
/// unchanged up to rounding.
class SifidMetric {
public:
    explicit SifidMetric(FeatureNetConfig config = {.width = 1.0, .seed = 3, .weights = {}});
    /// Throws DomainError for images smaller than kSifidMinSize.
    double distance(const Image& a, const Image& b);
    /// [C, N] features of one image.
    torch::Tensor features(const Image& image);

private:
    torch::nn::Sequential net_;
};

/// Frechet distance between Gaussians fitted to the columns of two [C, N]
/// feature matrices.
double frechet_distance(const torch::Tensor& a, const torch::Tensor& b);

/// Fully convolutional patch discriminator (three stride-2 4x4 stages then two
/// stride-1 stages, receptive field 70 px) producing a grid of logits.
class DiscriminatorImpl : public torch::nn::Module {
public:
    explicit DiscriminatorImpl(double width = 1.0);
    torch::Tensor forward(const torch::Tensor& images);  // [B,3,h,w] -> [B,1,h',w']

private:
    torch::nn::Sequential net_;
};
TORCH_MODULE(Discriminator);

}  // namespace camo
