#pragma once

#include <utility>
#include <vector>

#include <torch/torch.h>

#include "camo/image.hpp"
#include "camo/neural/feature_nets.hpp"
#include "camo/random.hpp"

namespace camo {

inline constexpr double kProbabilityFloor = 1e-6;

/// -E[log D(y)] - E[log(1 - D(y_hat))] over batch and patch grid, with
/// probabilities clamped to [1e-6, 1 - 1e-6].
torch::Tensor discriminator_loss(const torch::Tensor& real_logits, const torch::Tensor& fake_logits);
torch::Tensor discriminator_loss_from_probabilities(const torch::Tensor& real_p, const torch::Tensor& fake_p);

/// -E[log D(y_hat)].
torch::Tensor generator_adversarial_loss(const torch::Tensor& fake_logits);
torch::Tensor generator_adversarial_loss_from_probabilities(const torch::Tensor& fake_p);

/// photo + lambda * adv.
torch::Tensor total_generator_loss(const torch::Tensor& photo, const torch::Tensor& adv, double lambda_adv);
double total_generator_loss(double photo, double adv, double lambda_adv);

/// Sum over crop pairs of sum over VGG pooling stages of the mean absolute
/// activation difference. rendered, background: [B, 3, h, w].
torch::Tensor photoconsistency_loss(VggFeatures& vgg, const torch::Tensor& rendered, const torch::Tensor& background);

struct CropRect {
    int x0 = 0;
    int y0 = 0;
    int size = 0;
    int view = -1;
    bool intersects(const Mask& mask) const;
};

/// [3, size, size] crop of a [3, H, W] image; rows and columns outside the
/// image repeat the nearest edge. Differentiable.
torch::Tensor crop_tensor(const torch::Tensor& image, const CropRect& rect);

/// Uniform crop position; the crop lies inside the image when it fits.
CropRect random_crop_rect(int height, int width, int size, Rng& rng);

/// Crop centered on the mask's bounding-box center, shifted inside the image
/// when it fits.
CropRect centered_crop_rect(const Mask& mask, int size);

/// Crop containing the mask's bounding-box center, offset by up to `jitter`
/// pixels on each axis, kept inside the image when it fits and always
/// overlapping the mask. Throws SampleError for an empty mask.
CropRect fake_crop_rect(const Mask& mask, int size, int jitter, Rng& rng);

struct PatchBatch {
    torch::Tensor crops;  // [B, 3, size, size]
    std::vector<CropRect> rects;
    bool real = true;
};

/// `count` real crops of the background and `count` fake crops of the
/// composite around the object.
std::pair<PatchBatch, PatchBatch> sample_patches(const torch::Tensor& background, const torch::Tensor& composite,
                                                 const Mask& mask, Rng& rng, int count = 1, int size = 128,
                                                 int jitter = 32);

}  // namespace camo
