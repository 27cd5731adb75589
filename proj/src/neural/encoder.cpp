#include "camo/neural/encoder.hpp"

#include <algorithm>
#include <cmath>

#include "camo/errors.hpp"

namespace camo {

namespace nn = torch::nn;
namespace F = torch::nn::functional;

namespace {

nn::Conv2d conv(int in, int out, int k, int stride = 1) {
    return nn::Conv2d(nn::Conv2dOptions(in, out, k).stride(stride).padding(k / 2));
}

// Residual block of two 3x3 convolutions with a projection shortcut when the
// shape changes.
class BasicBlockImpl : public nn::Module {
public:
    BasicBlockImpl(int in, int out, int stride) {
        c1_ = register_module("c1", conv(in, out, 3, stride));
        c2_ = register_module("c2", conv(out, out, 3));
        if (stride != 1 || in != out) proj_ = register_module("proj", conv(in, out, 1, stride));
    }
    torch::Tensor forward(const torch::Tensor& x) {
        auto y = c2_(torch::relu(c1_(x)));
        return torch::relu(y + (proj_ ? proj_(x) : x));
    }

private:
    nn::Conv2d c1_{nullptr}, c2_{nullptr}, proj_{nullptr};
};
TORCH_MODULE(BasicBlock);

torch::Tensor upsample_to(const torch::Tensor& x, const torch::Tensor& like) {
    return F::interpolate(x, F::InterpolateFuncOptions()
                                 .size(std::vector<int64_t>{like.size(2), like.size(3)})
                                 .mode(torch::kBilinear)
                                 .align_corners(false));
}

}  // namespace

int FeaturePyramid::channels() const {
    int c = 0;
    for (const auto& m : maps) c += static_cast<int>(m.size(1));
    return c;
}

EncoderImpl::EncoderImpl(EncoderConfig config, int height, int width)
    : config_(config), height_(height), width_(width) {
    const auto ch = [&](int n) { return std::max(4, static_cast<int>(std::lround(n * config_.width))); };
    const int c64 = ch(64), c128 = ch(128), c256 = ch(256), c512 = ch(512);
    stem_ = register_module("stem", conv(3, c64, 7, 2));
    const int widths[4] = {c64, c128, c256, c512};
    int in = c64;
    for (int l = 0; l < 4; ++l) {
        nn::Sequential layer;
        layer->push_back(BasicBlock(in, widths[l], l == 0 ? 1 : 2));
        layer->push_back(BasicBlock(widths[l], widths[l], 1));
        layers_.push_back(register_module("layer" + std::to_string(l + 1), layer));
        in = widths[l];
    }
    // Decoder stages from 1/32 up to full resolution; each merges the skip at
    // its target scale (1/16, 1/8, 1/4, 1/2, input image).
    const int skips[5] = {c256, c128, c64, c64, 3};
    const int outs[5] = {c256, c128, c128, c64, c64};
    int prev = c512;
    for (int s = 0; s < 5; ++s) {
        nn::Sequential stage(conv(prev + skips[s], outs[s], 3), nn::ReLU(), conv(outs[s], outs[s], 3), nn::ReLU());
        decoder_.push_back(register_module("up" + std::to_string(s), stage));
        prev = outs[s];
    }
    heads_[0] = register_module("head_full", conv(outs[4], config_.channels[0], 1));
    heads_[1] = register_module("head_quarter", conv(outs[2], config_.channels[1], 1));
    heads_[2] = register_module("head_sixteenth", conv(outs[0], config_.channels[2], 1));
}

FeaturePyramid EncoderImpl::forward(const torch::Tensor& images) {
    if (images.dim() != 4 || images.size(1) != 3 || images.size(2) != height_ || images.size(3) != width_)
        throw ShapeError("encoder expects [B, 3, " + std::to_string(height_) + ", " + std::to_string(width_) +
                         "] images");
    const auto x = (images - 0.45) / 0.225;
    const auto half = torch::relu(stem_(x));
    auto y = F::max_pool2d(half, F::MaxPool2dFuncOptions(3).stride(2).padding(1));
    std::vector<torch::Tensor> feats;
    for (auto& layer : layers_) {
        y = layer->forward(y);
        feats.push_back(y);
    }
    const torch::Tensor skips[5] = {feats[2], feats[1], feats[0], half, x};
    torch::Tensor d = feats[3];
    std::vector<torch::Tensor> dec;
    for (int s = 0; s < 5; ++s) {
        d = decoder_[s]->forward(torch::cat({upsample_to(d, skips[s]), skips[s]}, 1));
        dec.push_back(d);
    }
    FeaturePyramid p;
    p.height = height_;
    p.width = width_;
    p.maps[0] = heads_[0](dec[4]);
    p.maps[1] = heads_[1](dec[2]);
    p.maps[2] = heads_[2](dec[0]);
    return p;
}

torch::Tensor sample_hypercolumns(const FeaturePyramid& pyramid, const torch::Tensor& pixels) {
    if (pixels.dim() != 3 || pixels.size(2) != 2) throw ShapeError("pixels must be [B, M, 2]");
    const auto scale = torch::tensor({2.0f / pyramid.width, 2.0f / pyramid.height});
    const auto grid = (pixels.to(torch::kFloat32) * scale - 1.0).unsqueeze(1);  // [B, 1, M, 2]
    std::vector<torch::Tensor> cols;
    for (const auto& m : pyramid.maps) {
        auto s = F::grid_sample(m, grid,
                                F::GridSampleFuncOptions()
                                    .mode(torch::kBilinear)
                                    .padding_mode(torch::kBorder)
                                    .align_corners(false));  // [B, C, 1, M]
        cols.push_back(s.squeeze(2).permute({0, 2, 1}));
    }
    return torch::cat(cols, 2);
}

}  // namespace camo
