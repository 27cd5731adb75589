#pragma once

#include <span>
#include <vector>

#include <torch/torch.h>

#include "camo/bvh.hpp"
#include "camo/geometry.hpp"
#include "camo/neural/encoder.hpp"

namespace camo {

struct TextureMlpConfig {
    int n_freq = kDefaultFrequencies;
    int width = 512;
    int blocks = 3;  // residual blocks before and after view pooling
};

/// Per-point network inputs for V conditioning views.
struct TextureInputs {
    torch::Tensor gamma;    // [M, 3 + 6 n_freq] positional encoding
    torch::Tensor hyper;    // [V, M, C] hypercolumns, zero where invalid
    torch::Tensor dirs;     // [V, M, 3] viewing directions
    torch::Tensor normals;  // [V, M, 3] camera-space normals
    torch::Tensor valid;    // [V, M, 1] 1 when the point is in front of the camera
};

/// Two-stage residual MLP: per-view blocks with shared weights (the per-view
/// input is re-injected into every block through its own linear shortcut),
/// mean over views, then view-agnostic blocks and a sigmoid RGB head.
class TextureMlpImpl : public torch::nn::Module {
public:
    TextureMlpImpl(TextureMlpConfig config, int hypercolumn_size);
    /// Returns [M, 3] colors in [0, 1]. Throws ContractError for V = 0.
    torch::Tensor forward(const TextureInputs& in);
    const TextureMlpConfig& config() const { return config_; }
    int input_size() const { return input_size_; }
    /// Multiplies the weights closing each residual branch and those of the
    /// color layer, so a freshly initialized model starts near mid-gray.
    void damp_init(double residual_scale, double output_scale);

private:
    torch::Tensor run(const TextureInputs& in);

    TextureMlpConfig config_;
    int input_size_;
    torch::nn::Linear input_{nullptr};
    std::vector<torch::nn::Linear> shortcuts_;
    std::vector<torch::nn::Sequential> stage1_;
    std::vector<torch::nn::Sequential> stage2_;
    torch::nn::Linear output_{nullptr};
};
TORCH_MODULE(TextureMlp);

struct NeuralTextureConfig {
    EncoderConfig encoder;
    TextureMlpConfig mlp;
    int height = 384;
    int width = 576;
};

/// Encoder E and MLP T; together the texturing function G.
class NeuralTextureImpl : public torch::nn::Module {
public:
    explicit NeuralTextureImpl(NeuralTextureConfig config);
    Encoder encoder{nullptr};
    TextureMlp mlp{nullptr};
    const NeuralTextureConfig& config() const { return config_; }

private:
    NeuralTextureConfig config_;
};
TORCH_MODULE(NeuralTexture);

inline constexpr double kResidualInitScale = 0.1;
inline constexpr double kOutputInitScale = 0.01;

/// Seeded He-normal weights and zero biases, with damped residual branches
/// and color layer.
void init_texture_net(NeuralTexture& net, uint64_t seed);

/// Encoded conditioning images.
struct Conditioning {
    std::vector<const CameraView*> views;
    FeaturePyramid pyramid;
};

Conditioning encode_conditioning(NeuralTexture& net, std::vector<const CameraView*> views);

/// Inputs of the texture MLP for world-space surface points of the placed
/// object; the normalizer maps object coordinates to [-1, 1].
TextureInputs texture_inputs(const Conditioning& cond, std::span<const Vec3> world_points,
                             const Similarity& object_to_world, const TriangleBvh& object_bvh,
                             const CoordinateNormalizer& normalizer, int n_freq);

/// Object geometry shared by all renders of one placement.
struct PlacedObject {
    const Mesh* mesh = nullptr;
    TriangleBvh bvh;
    CoordinateNormalizer normalizer;
    Similarity object_to_world;
    PlacedObject(const Mesh& mesh, const Similarity& object_to_world);
};

/// Colors of world-space surface points; independent of any render camera.
torch::Tensor texture_colors(NeuralTexture& net, const Conditioning& cond, const PlacedObject& object,
                             std::span<const Vec3> world_points);

struct NeuralRender {
    torch::Tensor composite;    // [3, H, W]
    Mask mask;
    torch::Tensor pixel_index;  // [M] flat indices of the covered pixels
    torch::Tensor colors;       // [M, 3]
    std::vector<Vec3> points;   // world-space surface point per covered pixel
    bool empty = false;         // nothing covered; composite is the background
};

/// Writes the textured object into a copy of `background` ([3, H, W], the
/// view's image when undefined). Differentiable with respect to the network.
NeuralRender render_object(NeuralTexture& net, const Conditioning& cond, const PlacedObject& object,
                           const CameraView& view, const torch::Tensor& background = {});

/// render_object for several views with a single texture evaluation.
std::vector<NeuralRender> render_objects(NeuralTexture& net, const Conditioning& cond, const PlacedObject& object,
                                         const std::vector<const CameraView*>& views,
                                         const std::vector<torch::Tensor>& backgrounds);

}  // namespace camo
