#pragma once

#include <torch/torch.h>

#include "camo/image.hpp"

namespace camo {

/// [3, H, W] float32 tensor holding the image's RGB planes.
torch::Tensor image_to_tensor(const Image& image);

/// Inverse of image_to_tensor; values are copied as they are (no clamping).
Image tensor_to_image(const torch::Tensor& chw);

/// [H, W] bool tensor.
torch::Tensor mask_to_tensor(const Mask& mask);

/// Single-threaded, deterministic kernels. Call before building models when
/// bit-exact reproducibility is needed.
void enable_deterministic_mode();

/// Fills every parameter of `module` from a private generator: Kaiming-normal
/// weights, zero biases.
void kaiming_init(torch::nn::Module& module, uint64_t seed);

}  // namespace camo
