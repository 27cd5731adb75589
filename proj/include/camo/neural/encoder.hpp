#pragma once

#include <array>

#include <torch/torch.h>

namespace camo {

struct EncoderConfig {
    double width = 1.0;                         // backbone channel multiplier
    std::array<int, 3> channels{64, 128, 256};  // full, 1/4, 1/16 outputs
    int hypercolumn_size() const { return channels[0] + channels[1] + channels[2]; }
};

/// Feature maps at full, 1/4 and 1/16 resolution (sizes rounded up), each
/// [B, C, h, w], for a batch of images of size height x width.
struct FeaturePyramid {
    std::array<torch::Tensor, 3> maps;
    int height = 0;
    int width = 0;
    int channels() const;
};

/// U-Net over a ResNet-18 layout: a strided residual backbone down to 1/32
/// and a decoder that upsamples and merges the skip connections, with 1x1
/// heads at the three output scales. There are no normalization layers, so
/// each image is encoded independently of the rest of the batch.
class EncoderImpl : public torch::nn::Module {
public:
    EncoderImpl(EncoderConfig config, int height, int width);

    /// images: [B, 3, height, width] in [0, 1]. Throws ShapeError on any
    /// other size.
    FeaturePyramid forward(const torch::Tensor& images);

    const EncoderConfig& config() const { return config_; }
    int height() const { return height_; }
    int width() const { return width_; }

private:
    EncoderConfig config_;
    int height_;
    int width_;
    torch::nn::Conv2d stem_{nullptr};
    std::vector<torch::nn::Sequential> layers_;
    std::vector<torch::nn::Sequential> decoder_;
    std::array<torch::nn::Conv2d, 3> heads_{nullptr, nullptr, nullptr};
};
TORCH_MODULE(Encoder);

/// Bilinear samples of every pyramid level at continuous full-resolution
/// pixel coordinates (x, y), corner origin, clamped at the border.
/// pixels: [B, M, 2] for the B images of the pyramid. Returns [B, M, C].
torch::Tensor sample_hypercolumns(const FeaturePyramid& pyramid, const torch::Tensor& pixels);

}  // namespace camo
