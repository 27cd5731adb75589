#include "camo/neural/feature_nets.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>

#include "camo/errors.hpp"
#include "camo/neural/checkpoint.hpp"
#include "camo/neural/tensor_bridge.hpp"

namespace camo {

namespace nn = torch::nn;
namespace F = torch::nn::functional;

namespace {

// VGG-16 stages: convolution widths per stage.
const std::vector<std::vector<int>> kVggStages = {{64, 64}, {128, 128}, {256, 256, 256}, {512, 512, 512}, {512, 512, 512}};

void init_frozen(nn::Module& m, const FeatureNetConfig& config) {
    if (config.weights.empty())
        kaiming_init(m, config.seed);
    else
        load_module_state(m, read_checkpoint(config.weights).tensors);
    for (auto& p : m.parameters()) p.set_requires_grad(false);
    m.eval();
}

torch::Tensor imagenet_normalize(const torch::Tensor& x) {
    const auto mean = torch::tensor({0.485f, 0.456f, 0.406f}).view({1, 3, 1, 1});
    const auto std = torch::tensor({0.229f, 0.224f, 0.225f}).view({1, 3, 1, 1});
    return (x - mean) / std;
}

}  // namespace

VggFeaturesImpl::VggFeaturesImpl(FeatureNetConfig config) {
    int in = 3, k = 0;
    for (const auto& stage : kVggStages)
        for (int c : stage) {
            const int out = std::max(4, static_cast<int>(std::lround(c * config.width)));
            convs_.push_back(register_module("conv" + std::to_string(k++), nn::Conv2d(nn::Conv2dOptions(in, out, 3).padding(1))));
            in = out;
        }
    init_frozen(*this, config);
}

std::vector<torch::Tensor> VggFeaturesImpl::run(const torch::Tensor& images, bool pools) {
    auto x = imagenet_normalize(images);
    std::vector<torch::Tensor> out;
    size_t k = 0;
    for (size_t s = 0; s < kVggStages.size(); ++s) {
        if (pools && s == 4) break;
        for (size_t c = 0; c < kVggStages[s].size(); ++c) x = torch::relu(convs_[k++](x));
        if (pools) {
            x = F::max_pool2d(x, F::MaxPool2dFuncOptions(2).stride(2).ceil_mode(true));
            out.push_back(x);
        } else {
            out.push_back(x);
            if (s + 1 < kVggStages.size()) x = F::max_pool2d(x, F::MaxPool2dFuncOptions(2).stride(2).ceil_mode(true));
        }
    }
    return out;
}

std::vector<torch::Tensor> VggFeaturesImpl::forward(const torch::Tensor& images) { return run(images, true); }
std::vector<torch::Tensor> VggFeaturesImpl::relu_taps(const torch::Tensor& images) { return run(images, false); }

PerceptualMetric::PerceptualMetric(FeatureNetConfig config) : net_(config) {}

torch::Tensor PerceptualMetric::distance(const torch::Tensor& a, const torch::Tensor& b) {
    if (a.sizes() != b.sizes()) throw ShapeError("perceptual distance needs equally sized crops");
    torch::NoGradGuard guard;
    const auto fa = net_->relu_taps(a), fb = net_->relu_taps(b);
    auto total = torch::zeros({a.size(0)}, torch::kFloat64);
    for (size_t l = 0; l < fa.size(); ++l) {
        const auto na = fa[l] / (fa[l].pow(2).sum(1, true).sqrt() + 1e-10);
        const auto nb = fb[l] / (fb[l].pow(2).sum(1, true).sqrt() + 1e-10);
        total = total + (na - nb).pow(2).sum(1).mean({1, 2}).to(torch::kFloat64);
    }
    return total;
}

double PerceptualMetric::distance(const Image& a, const Image& b) {
    if (a.height != b.height || a.width != b.width) throw ShapeError("perceptual distance needs equally sized crops");
    return distance(image_to_tensor(a).unsqueeze(0), image_to_tensor(b).unsqueeze(0)).item<double>();
}

SifidMetric::SifidMetric(FeatureNetConfig config) {
    const int widths[3] = {32, 64, 64};
    int in = 3;
    for (int k = 0; k < 3; ++k) {
        const int out = std::max(4, static_cast<int>(std::lround(widths[k] * config.width)));
        net_->push_back(nn::Conv2d(nn::Conv2dOptions(in, out, 3).padding(1)));
        if (k < 2) net_->push_back(nn::ReLU());
        in = out;
    }
    init_frozen(*net_, config);
    torch::NoGradGuard guard;
    for (auto& p : net_->parameters())
        if (p.dim() == 4) p.copy_(0.5 * (p + p.flip({3})));
}

torch::Tensor SifidMetric::features(const Image& image) {
    if (image.height < kSifidMinSize || image.width < kSifidMinSize)
        throw DomainError("single-image metric needs crops of at least " + std::to_string(kSifidMinSize) + " px");
    torch::NoGradGuard guard;
    const auto f = net_->forward(imagenet_normalize(image_to_tensor(image).unsqueeze(0)));
    return f.squeeze(0).reshape({f.size(1), -1}).to(torch::kFloat64);
}

double SifidMetric::distance(const Image& a, const Image& b) { return frechet_distance(features(a), features(b)); }

double frechet_distance(const torch::Tensor& a, const torch::Tensor& b) {
    using Eigen::MatrixXd;
    using Eigen::VectorXd;
    const auto stats = [](const torch::Tensor& t, VectorXd& mu, MatrixXd& cov) {
        const auto c = t.contiguous().to(torch::kFloat64);
        const Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> m(
            c.data_ptr<double>(), c.size(0), c.size(1));
        mu = m.rowwise().mean();
        const MatrixXd centered = m.colwise() - mu;
        cov = centered * centered.transpose() / std::max<double>(1.0, static_cast<double>(m.cols() - 1));
    };
    VectorXd mu_a, mu_b;
    MatrixXd ca, cb;
    stats(a, mu_a, ca);
    stats(b, mu_b, cb);
    // Tr sqrt(ca cb) = sum of sqrt eigenvalues of sqrt(ca) cb sqrt(ca), which is symmetric PSD.
    Eigen::SelfAdjointEigenSolver<MatrixXd> ea(ca);
    const VectorXd la = ea.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    const MatrixXd sa = ea.eigenvectors() * la.asDiagonal() * ea.eigenvectors().transpose();
    const MatrixXd inner = sa * cb * sa;
    Eigen::SelfAdjointEigenSolver<MatrixXd> ei(0.5 * (inner + inner.transpose()), Eigen::EigenvaluesOnly);
    const double tr_sqrt = ei.eigenvalues().cwiseMax(0.0).cwiseSqrt().sum();
    const double d = (mu_a - mu_b).squaredNorm() + ca.trace() + cb.trace() - 2.0 * tr_sqrt;
    return std::max(0.0, d);
}

DiscriminatorImpl::DiscriminatorImpl(double width) {
    const auto ch = [&](int n) { return std::max(4, static_cast<int>(std::lround(n * width))); };
    const int outs[4] = {ch(64), ch(128), ch(256), ch(512)};
    int in = 3;
    for (int k = 0; k < 4; ++k) {
        net_->push_back(nn::Conv2d(nn::Conv2dOptions(in, outs[k], 4).stride(k < 3 ? 2 : 1).padding(1)));
        net_->push_back(nn::LeakyReLU(nn::LeakyReLUOptions().negative_slope(0.2)));
        in = outs[k];
    }
    net_->push_back(nn::Conv2d(nn::Conv2dOptions(in, 1, 4).stride(1).padding(1)));
    register_module("net", net_);
}

torch::Tensor DiscriminatorImpl::forward(const torch::Tensor& images) { return net_->forward(images * 2.0 - 1.0); }

}  // namespace camo
