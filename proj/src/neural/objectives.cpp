#include "camo/neural/objectives.hpp"

#include <algorithm>
#include <cmath>

#include "camo/errors.hpp"

namespace camo {

namespace {

torch::Tensor safe_log(const torch::Tensor& p) {
    return torch::log(p.clamp(kProbabilityFloor, 1.0 - kProbabilityFloor));
}

int place(int center, int size, int extent) {
    int o = center - size / 2;
    if (size <= extent) o = std::clamp(o, 0, extent - size);
    return o;
}

}  // namespace

torch::Tensor discriminator_loss_from_probabilities(const torch::Tensor& real_p, const torch::Tensor& fake_p) {
    if (real_p.numel() == 0 || fake_p.numel() == 0) throw ContractError("discriminator loss needs nonempty batches");
    return -safe_log(real_p).mean() - safe_log(1.0 - fake_p).mean();
}

// -log(sigmoid(x)) = softplus(-x) and -log(1 - sigmoid(x)) = softplus(x) stay finite with nonzero
// gradients when the discriminator saturates.
torch::Tensor discriminator_loss(const torch::Tensor& real_logits, const torch::Tensor& fake_logits) {
    if (real_logits.numel() == 0 || fake_logits.numel() == 0)
        throw ContractError("discriminator loss needs nonempty batches");
    return torch::softplus(-real_logits).mean() + torch::softplus(fake_logits).mean();
}

torch::Tensor generator_adversarial_loss_from_probabilities(const torch::Tensor& fake_p) {
    if (fake_p.numel() == 0) throw ContractError("adversarial loss needs a nonempty batch");
    return -safe_log(fake_p).mean();
}

torch::Tensor generator_adversarial_loss(const torch::Tensor& fake_logits) {
    if (fake_logits.numel() == 0) throw ContractError("adversarial loss needs a nonempty batch");
    return torch::softplus(-fake_logits).mean();
}

torch::Tensor total_generator_loss(const torch::Tensor& photo, const torch::Tensor& adv, double lambda_adv) {
    return photo + lambda_adv * adv;
}

double total_generator_loss(double photo, double adv, double lambda_adv) { return photo + lambda_adv * adv; }

torch::Tensor photoconsistency_loss(VggFeatures& vgg, const torch::Tensor& rendered, const torch::Tensor& background) {
    if (rendered.sizes() != background.sizes()) throw ShapeError("photoconsistency needs equally shaped crops");
    const int64_t n = rendered.size(0);
    const auto both = vgg->forward(torch::cat({rendered, background}, 0));
    auto loss = torch::zeros({}, rendered.options());
    for (const auto& f : both) {
        const auto d = (f.narrow(0, 0, n) - f.narrow(0, n, n)).abs();
        loss = loss + d.mean({1, 2, 3}).sum();
    }
    return loss;
}

bool CropRect::intersects(const Mask& mask) const {
    const int ya = std::max(0, y0), yb = std::min(mask.height, y0 + size);
    const int xa = std::max(0, x0), xb = std::min(mask.width, x0 + size);
    for (int y = ya; y < yb; ++y)
        for (int x = xa; x < xb; ++x)
            if (mask.at(y, x)) return true;
    return false;
}

torch::Tensor crop_tensor(const torch::Tensor& image, const CropRect& r) {
    const int64_t h = image.size(1), w = image.size(2);
    if (r.y0 >= 0 && r.x0 >= 0 && r.y0 + r.size <= h && r.x0 + r.size <= w)
        return image.narrow(1, r.y0, r.size).narrow(2, r.x0, r.size);
    const auto rows = torch::arange(r.y0, r.y0 + r.size, torch::kLong).clamp(0, h - 1);
    const auto cols = torch::arange(r.x0, r.x0 + r.size, torch::kLong).clamp(0, w - 1);
    return image.index_select(1, rows).index_select(2, cols);
}

CropRect random_crop_rect(int height, int width, int size, Rng& rng) {
    CropRect r;
    r.size = size;
    r.x0 = width >= size ? uniform_int(rng, 0, width - size) : 0;
    r.y0 = height >= size ? uniform_int(rng, 0, height - size) : 0;
    return r;
}

CropRect centered_crop_rect(const Mask& mask, int size) {
    const PixelBox box = bounding_box(mask);
    if (!box.valid()) throw SampleError("object mask is empty");
    CropRect r;
    r.size = size;
    r.x0 = place((box.x0 + box.x1 + 1) / 2, size, mask.width);
    r.y0 = place((box.y0 + box.y1 + 1) / 2, size, mask.height);
    return r;
}

CropRect fake_crop_rect(const Mask& mask, int size, int jitter, Rng& rng) {
    const PixelBox box = bounding_box(mask);
    if (!box.valid()) throw SampleError("object mask is empty");
    const int cx = (box.x0 + box.x1 + 1) / 2, cy = (box.y0 + box.y1 + 1) / 2;
    const int j = std::min(jitter, size / 2 - 1);
    for (int attempt = 0; attempt < 100; ++attempt) {
        CropRect r;
        r.size = size;
        r.x0 = place(cx + uniform_int(rng, -j, j), size, mask.width);
        r.y0 = place(cy + uniform_int(rng, -j, j), size, mask.height);
        if (r.intersects(mask)) return r;
    }
    // Bounding-box centers off the mask (thin or concave shapes): center on
    // the mask centroid instead.
    double sx = 0, sy = 0, n = 0;
    for (int y = 0; y < mask.height; ++y)
        for (int x = 0; x < mask.width; ++x)
            if (mask.at(y, x)) sx += x, sy += y, ++n;
    CropRect r;
    r.size = size;
    r.x0 = place(static_cast<int>(sx / n), size, mask.width);
    r.y0 = place(static_cast<int>(sy / n), size, mask.height);
    return r;
}

std::pair<PatchBatch, PatchBatch> sample_patches(const torch::Tensor& background, const torch::Tensor& composite,
                                                 const Mask& mask, Rng& rng, int count, int size, int jitter) {
    PatchBatch real, fake;
    fake.real = false;
    std::vector<torch::Tensor> rc, fc;
    for (int k = 0; k < count; ++k) {
        const CropRect r = random_crop_rect(static_cast<int>(background.size(1)), static_cast<int>(background.size(2)), size, rng);
        real.rects.push_back(r);
        rc.push_back(crop_tensor(background, r));
    }
    for (int k = 0; k < count; ++k) {
        const CropRect r = fake_crop_rect(mask, size, jitter, rng);
        fake.rects.push_back(r);
        fc.push_back(crop_tensor(composite, r));
    }
    real.crops = torch::stack(rc);
    fake.crops = torch::stack(fc);
    return {real, fake};
}

}  // namespace camo
