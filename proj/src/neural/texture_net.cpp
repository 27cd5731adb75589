#include "camo/neural/texture_net.hpp"

#include "camo/errors.hpp"
#include "camo/neural/tensor_bridge.hpp"

namespace camo {

namespace nn = torch::nn;

namespace {

constexpr int64_t kRowBlock = 64;

nn::Sequential residual_body(int width) {
    return nn::Sequential(nn::ReLU(), nn::Linear(width, width), nn::ReLU(), nn::Linear(width, width));
}

torch::Tensor vec3_rows(const std::vector<Vec3>& v) {
    auto t = torch::empty({static_cast<int64_t>(v.size()), 3}, torch::kFloat32);
    auto a = t.accessor<float, 2>();
    for (size_t i = 0; i < v.size(); ++i)
        for (int c = 0; c < 3; ++c) a[i][c] = static_cast<float>(v[i][c]);
    return t;
}

// Rows are padded to a whole number of blocks so every row goes through the
// same matrix kernels whatever the batch size, which keeps a point's color
// independent of the other points evaluated with it.
torch::Tensor pad_rows(const torch::Tensor& t, int dim, int64_t rows) {
    const int64_t m = t.size(dim);
    if (m == rows) return t;
    auto shape = t.sizes().vec();
    shape[dim] = rows - m;
    return torch::cat({t, torch::zeros(shape, t.options())}, dim);
}

}  // namespace

TextureMlpImpl::TextureMlpImpl(TextureMlpConfig config, int hypercolumn_size)
    : config_(config), input_size_(3 + 6 * config.n_freq + hypercolumn_size + 1 + 3 + 3) {
    const int w = config_.width;
    input_ = register_module("input", nn::Linear(input_size_, w));
    for (int b = 0; b < config_.blocks; ++b) {
        shortcuts_.push_back(register_module("shortcut" + std::to_string(b), nn::Linear(input_size_, w)));
        stage1_.push_back(register_module("pre" + std::to_string(b), residual_body(w)));
        stage2_.push_back(register_module("post" + std::to_string(b), residual_body(w)));
    }
    output_ = register_module("output", nn::Linear(w, 3));
}

void TextureMlpImpl::damp_init(double residual_scale, double output_scale) {
    torch::NoGradGuard guard;
    for (auto* stages : {&stage1_, &stage2_})
        for (auto& body : *stages) body[3]->as<nn::Linear>()->weight.mul_(residual_scale);
    output_->weight.mul_(output_scale);
}

torch::Tensor TextureMlpImpl::forward(const TextureInputs& in) {
    if (!in.hyper.defined() || in.hyper.size(0) == 0) throw ContractError("texture needs at least one conditioning view");
    const int64_t m = in.gamma.size(0);
    if (m == 0) return torch::zeros({0, 3});
    const int64_t rows = (m + kRowBlock - 1) / kRowBlock * kRowBlock;
    TextureInputs padded{pad_rows(in.gamma, 0, rows), pad_rows(in.hyper, 1, rows), pad_rows(in.dirs, 1, rows),
                         pad_rows(in.normals, 1, rows), pad_rows(in.valid, 1, rows)};
    return run(padded).narrow(0, 0, m);
}

torch::Tensor TextureMlpImpl::run(const TextureInputs& in) {
    const int64_t v = in.hyper.size(0), m = in.gamma.size(0);
    const auto gamma = in.gamma.unsqueeze(0).expand({v, m, in.gamma.size(1)});
    const auto cond = torch::cat({gamma, in.hyper, in.valid, in.dirs, in.normals}, 2).reshape({v * m, input_size_});
    auto h = input_(cond);
    for (int b = 0; b < config_.blocks; ++b) {
        h = h + shortcuts_[b](cond);
        h = h + stage1_[b]->forward(h);
    }
    // Summing in sorted order makes the pooled value independent of view order.
    h = std::get<0>(h.reshape({v, m, config_.width}).sort(0)).sum(0) / static_cast<double>(v);
    for (int b = 0; b < config_.blocks; ++b) h = h + stage2_[b]->forward(h);
    return torch::sigmoid(output_(torch::relu(h)));
}

NeuralTextureImpl::NeuralTextureImpl(NeuralTextureConfig config) : config_(config) {
    encoder = register_module("encoder", Encoder(config_.encoder, config_.height, config_.width));
    mlp = register_module("mlp", TextureMlp(config_.mlp, config_.encoder.hypercolumn_size()));
}

void init_texture_net(NeuralTexture& net, uint64_t seed) {
    kaiming_init(*net, seed);
    net->mlp->damp_init(kResidualInitScale, kOutputInitScale);
}

Conditioning encode_conditioning(NeuralTexture& net, std::vector<const CameraView*> views) {
    if (views.empty()) throw ContractError("texture needs at least one conditioning view");
    std::vector<torch::Tensor> imgs;
    for (const auto* v : views) imgs.push_back(image_to_tensor(v->image));
    Conditioning c;
    c.views = std::move(views);
    c.pyramid = net->encoder->forward(torch::stack(imgs));
    return c;
}

PlacedObject::PlacedObject(const Mesh& m, const Similarity& t)
    : mesh(&m), bvh(m), normalizer(m), object_to_world(t) {}

TextureInputs texture_inputs(const Conditioning& cond, std::span<const Vec3> world_points,
                             const Similarity& object_to_world, const TriangleBvh& object_bvh,
                             const CoordinateNormalizer& normalizer, int n_freq) {
    const SurfaceQuery q = build_surface_query(world_points, object_to_world, object_bvh, cond.views);
    const int64_t m = static_cast<int64_t>(q.size());
    const int64_t v = static_cast<int64_t>(cond.views.size());
    const int64_t g = 3 + 6 * n_freq;
    TextureInputs in;
    in.gamma = torch::empty({m, g}, torch::kFloat32);
    {
        auto a = in.gamma.accessor<float, 2>();
        for (int64_t i = 0; i < m; ++i) {
            const Eigen::VectorXd e = positional_encoding(normalizer(q.points[i]), n_freq);
            for (int64_t k = 0; k < g; ++k) a[i][k] = static_cast<float>(e[k]);
        }
    }
    std::vector<torch::Tensor> pix, dirs, normals, valid;
    for (const auto& enc : q.views) {
        auto p = torch::empty({m, 2}, torch::kFloat32);
        auto val = torch::empty({m, 1}, torch::kFloat32);
        auto pa = p.accessor<float, 2>();
        auto va = val.accessor<float, 2>();
        for (int64_t i = 0; i < m; ++i) {
            pa[i][0] = static_cast<float>(enc.pixels[i].x());
            pa[i][1] = static_cast<float>(enc.pixels[i].y());
            va[i][0] = enc.in_front[i] ? 1.0f : 0.0f;
        }
        pix.push_back(p);
        valid.push_back(val);
        dirs.push_back(vec3_rows(enc.directions));
        normals.push_back(vec3_rows(enc.normals));
    }
    in.valid = torch::stack(valid);
    in.dirs = torch::stack(dirs);
    in.normals = torch::stack(normals);
    in.hyper = m > 0 ? sample_hypercolumns(cond.pyramid, torch::stack(pix)) * in.valid
                     : torch::zeros({v, 0, cond.pyramid.channels()});
    return in;
}

torch::Tensor texture_colors(NeuralTexture& net, const Conditioning& cond, const PlacedObject& object,
                             std::span<const Vec3> world_points) {
    const TextureInputs in = texture_inputs(cond, world_points, object.object_to_world, object.bvh,
                                            object.normalizer, net->mlp->config().n_freq);
    return net->mlp->forward(in);
}

std::vector<NeuralRender> render_objects(NeuralTexture& net, const Conditioning& cond, const PlacedObject& object,
                                         const std::vector<const CameraView*>& views,
                                         const std::vector<torch::Tensor>& backgrounds) {
    std::vector<NeuralRender> out(views.size());
    std::vector<Vec3> all_points;
    std::vector<int64_t> offsets = {0};
    for (size_t k = 0; k < views.size(); ++k) {
        const CameraView& view = *views[k];
        const int h = view.height(), w = view.width();
        NeuralRender& r = out[k];
        r.composite = k < backgrounds.size() && backgrounds[k].defined() ? backgrounds[k] : image_to_tensor(view.image);
        if (r.composite.size(1) != h || r.composite.size(2) != w) throw ShapeError("background does not match the view size");
        const DepthMap depth = render_depth(*object.mesh, object.object_to_world, view, h, w);
        r.mask = depth.mask;
        r.empty = depth.empty();
        SurfacePoints pts = visible_surface_points(depth, view);
        r.pixel_index = torch::empty({static_cast<int64_t>(pts.size())}, torch::kLong);
        auto ia = r.pixel_index.accessor<int64_t, 1>();
        for (size_t i = 0; i < pts.size(); ++i) ia[i] = static_cast<int64_t>(pts.pixels[i].y) * w + pts.pixels[i].x;
        all_points.insert(all_points.end(), pts.world.begin(), pts.world.end());
        offsets.push_back(static_cast<int64_t>(all_points.size()));
        r.points = std::move(pts.world);
    }
    const torch::Tensor colors = all_points.empty() ? torch::zeros({0, 3}) : texture_colors(net, cond, object, all_points);
    for (size_t k = 0; k < views.size(); ++k) {
        NeuralRender& r = out[k];
        r.colors = colors.narrow(0, offsets[k], offsets[k + 1] - offsets[k]);
        if (r.empty) continue;
        const int64_t h = r.composite.size(1), w = r.composite.size(2);
        r.composite = r.composite.reshape({3, h * w}).index_copy(1, r.pixel_index, r.colors.t()).reshape({3, h, w});
    }
    return out;
}

NeuralRender render_object(NeuralTexture& net, const Conditioning& cond, const PlacedObject& object,
                           const CameraView& view, const torch::Tensor& background) {
    return std::move(render_objects(net, cond, object, {&view}, {background}).front());
}

}  // namespace camo
