#include "camo/neural/tensor_bridge.hpp"

#include <cmath>

#include "camo/errors.hpp"

namespace camo {

torch::Tensor image_to_tensor(const Image& image) {
    auto hwc = torch::from_blob(const_cast<float*>(image.data.data()), {image.height, image.width, 3},
                                torch::kFloat32);
    return hwc.permute({2, 0, 1}).contiguous();
}

Image tensor_to_image(const torch::Tensor& chw) {
    if (chw.dim() != 3 || chw.size(0) != 3) throw ShapeError("expected a [3, H, W] tensor");
    const auto hwc = chw.detach().to(torch::kFloat32).permute({1, 2, 0}).contiguous();
    Image img(static_cast<int>(chw.size(1)), static_cast<int>(chw.size(2)));
    std::copy_n(hwc.data_ptr<float>(), img.data.size(), img.data.begin());
    return img;
}

torch::Tensor mask_to_tensor(const Mask& mask) {
    auto t = torch::from_blob(const_cast<uint8_t*>(mask.data.data()), {mask.height, mask.width}, torch::kUInt8);
    return t.to(torch::kBool);
}

void enable_deterministic_mode() {
    torch::set_num_threads(1);
    at::globalContext().setFlushDenormal(true);
    at::globalContext().setDeterministicAlgorithms(true, false);
}

void kaiming_init(torch::nn::Module& module, uint64_t seed) {
    auto gen = at::make_generator<at::CPUGeneratorImpl>(seed);
    torch::NoGradGuard guard;
    for (auto& p : module.named_parameters(true)) {
        torch::Tensor& t = p.value();
        if (t.dim() <= 1) {
            t.zero_();
            continue;
        }
        const double fan_in = static_cast<double>(t.numel() / t.size(0));
        t.normal_(0.0, std::sqrt(2.0 / fan_in), gen);
    }
}

}  // namespace camo
