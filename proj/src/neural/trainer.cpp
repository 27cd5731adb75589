#include "camo/neural/trainer.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>

#include "camo/errors.hpp"
#include "camo/geometry.hpp"
#include "camo/neural/checkpoint.hpp"
#include "camo/neural/objectives.hpp"
#include "camo/neural/tensor_bridge.hpp"

namespace camo {

using nlohmann::json;

TrainConfig TrainConfig::toy() {
    TrainConfig c;
    c.height = 64;
    c.width = 96;
    c.crop = 32;
    c.jitter = 8;
    c.batch_size = 4;
    c.iterations = 2000;
    c.checkpoint_every = 500;
    c.model.encoder.width = 0.25;
    c.model.encoder.channels = {16, 32, 64};
    c.model.mlp.width = 64;
    c.vgg_width = 0.25;
    c.discriminator_width = 0.25;
    return c;
}

void TrainConfig::validate(int n_train_views) const {
    const auto need = [](bool ok, const std::string& what) {
        if (!ok) throw ConfigError(what);
    };
    need(n_input >= 1 && n_render >= 1, "n_input and n_render must be positive");
    need(n_input + n_render <= n_train_views, "n_input + n_render (" + std::to_string(n_input + n_render) +
                                                  ") exceeds the " + std::to_string(n_train_views) + " train views");
    need(batch_size >= 1 && iterations >= 0, "batch_size must be positive and iterations non-negative");
    need(lr_g > 0 && lr_d > 0, "learning rates must be positive");
    need(beta1 >= 0 && beta1 < 1 && beta2 >= 0 && beta2 < 1, "Adam betas must lie in [0, 1)");
    need(lambda_adv >= 0, "lambda_adv must be non-negative");
    need(height >= 16 && width >= 16, "image size must be at least 16x16");
    need(crop >= 16 && jitter >= 0, "crop must be at least 16 and jitter non-negative");
    need(checkpoint_every >= 1 && max_retries >= 1, "checkpoint_every and max_retries must be positive");
    need(placement.scale_min > 0 && placement.scale_min <= placement.scale_max, "invalid scale range");
    need(model.mlp.width >= 1 && model.mlp.blocks >= 1 && model.mlp.n_freq >= 0, "invalid MLP size");
    need(vgg_width > 0 && discriminator_width > 0 && model.encoder.width > 0, "network widths must be positive");
}

json to_json(const TrainConfig& c) {
    return {{"n_input", c.n_input},
            {"n_render", c.n_render},
            {"batch_size", c.batch_size},
            {"iterations", c.iterations},
            {"lr_g", c.lr_g},
            {"lr_d", c.lr_d},
            {"beta1", c.beta1},
            {"beta2", c.beta2},
            {"lambda_adv", c.lambda_adv},
            {"adversarial", c.adversarial},
            {"height", c.height},
            {"width", c.width},
            {"crop", c.crop},
            {"jitter", c.jitter},
            {"seed", c.seed},
            {"checkpoint_every", c.checkpoint_every},
            {"max_retries", c.max_retries},
            {"fixed_placement", c.fixed_placement},
            {"placement",
             {{"max_shift", c.placement.max_shift},
              {"scale_min", c.placement.scale_min},
              {"scale_max", c.placement.scale_max},
              {"random_yaw", c.placement.random_yaw}}},
            {"encoder_width", c.model.encoder.width},
            {"encoder_channels", c.model.encoder.channels},
            {"mlp_width", c.model.mlp.width},
            {"mlp_blocks", c.model.mlp.blocks},
            {"n_freq", c.model.mlp.n_freq},
            {"vgg_width", c.vgg_width},
            {"discriminator_width", c.discriminator_width},
            {"feature_seed", c.feature_seed},
            {"vgg_weights", c.vgg_weights.string()}};
}

TrainConfig train_config_from_json(const json& j, TrainConfig c) {
    if (!j.is_object()) throw ConfigError("training config must be a JSON object");
    try {
        for (const auto& [key, v] : j.items()) {
            if (key == "n_input") c.n_input = v.get<int>();
            else if (key == "n_render") c.n_render = v.get<int>();
            else if (key == "batch_size") c.batch_size = v.get<int>();
            else if (key == "iterations") c.iterations = v.get<int>();
            else if (key == "lr_g") c.lr_g = v.get<double>();
            else if (key == "lr_d") c.lr_d = v.get<double>();
            else if (key == "beta1") c.beta1 = v.get<double>();
            else if (key == "beta2") c.beta2 = v.get<double>();
            else if (key == "lambda_adv") c.lambda_adv = v.get<double>();
            else if (key == "adversarial") c.adversarial = v.get<bool>();
            else if (key == "height") c.height = v.get<int>();
            else if (key == "width") c.width = v.get<int>();
            else if (key == "crop") c.crop = v.get<int>();
            else if (key == "jitter") c.jitter = v.get<int>();
            else if (key == "seed") c.seed = v.get<uint64_t>();
            else if (key == "checkpoint_every") c.checkpoint_every = v.get<int>();
            else if (key == "max_retries") c.max_retries = v.get<int>();
            else if (key == "fixed_placement") c.fixed_placement = v.get<bool>();
            else if (key == "placement") {
                for (const auto& [pk, pv] : v.items()) {
                    if (pk == "max_shift") c.placement.max_shift = pv.get<double>();
                    else if (pk == "scale_min") c.placement.scale_min = pv.get<double>();
                    else if (pk == "scale_max") c.placement.scale_max = pv.get<double>();
                    else if (pk == "random_yaw") c.placement.random_yaw = pv.get<bool>();
                    else throw ConfigError("unknown placement key '" + pk + "'");
                }
            } else if (key == "encoder_width") c.model.encoder.width = v.get<double>();
            else if (key == "encoder_channels") c.model.encoder.channels = v.get<std::array<int, 3>>();
            else if (key == "mlp_width") c.model.mlp.width = v.get<int>();
            else if (key == "mlp_blocks") c.model.mlp.blocks = v.get<int>();
            else if (key == "n_freq") c.model.mlp.n_freq = v.get<int>();
            else if (key == "vgg_width") c.vgg_width = v.get<double>();
            else if (key == "discriminator_width") c.discriminator_width = v.get<double>();
            else if (key == "feature_seed") c.feature_seed = v.get<uint64_t>();
            else if (key == "vgg_weights") c.vgg_weights = v.get<std::string>();
            else throw ConfigError("unknown training config key '" + key + "'");
        }
    } catch (const json::exception& e) {
        throw ConfigError(std::string("bad training config value: ") + e.what());
    }
    return c;
}

json to_json(const TrainSample& s) {
    return {{"placement", {{"position", {s.placement.position.x(), s.placement.position.y(), s.placement.position.z()}},
                           {"scale", s.placement.scale},
                           {"yaw", s.placement.yaw}}},
            {"input_views", s.input_views},
            {"render_views", s.render_views}};
}

json to_json(const StepMetrics& m) {
    return {{"iteration", m.iteration}, {"l_photo", m.photo}, {"l_photo_per_view", m.photo_per_view},
            {"l_adv", m.adv},           {"l_d", m.disc},      {"l_total", m.total}};
}

TrainSample make_sample(const Scene& scene, const Mesh& mesh, const TrainConfig& config, Rng& rng) {
    const std::vector<int> train = scene.view_indices(ViewRole::train);
    const int n = config.n_input + config.n_render;
    if (n > static_cast<int>(train.size()))
        throw ConfigError("n_input + n_render exceeds the number of train views");
    const std::vector<int> pick = sample_without_replacement(rng, static_cast<int>(train.size()), n);
    TrainSample s;
    for (int k = 0; k < n; ++k) (k < config.n_input ? s.input_views : s.render_views).push_back(train[pick[k]]);
    for (int attempt = 0; attempt < config.max_retries; ++attempt) {
        s.placement = config.fixed_placement ? anchor_placement(scene) : sample_placement(scene, rng, config.placement);
        const Mesh world = transformed(mesh, object_to_world(scene, s.placement));
        bool visible = true;
        for (int v : s.input_views) visible = visible && !render_depth(world, scene.views[v], config.height, config.width).empty();
        for (int v : s.render_views) visible = visible && !render_depth(world, scene.views[v], config.height, config.width).empty();
        if (visible) return s;
        if (config.fixed_placement) break;
    }
    throw SampleError("no placement visible in all selected views after " + std::to_string(config.max_retries) +
                      " attempts");
}

Trainer::Trainer(const Scene& scene, const Mesh& mesh, TrainConfig config)
    : scene_(resize_scene(scene, config.height, config.width)), mesh_(mesh), config_(std::move(config)), rng_(config_.seed) {
    config_.validate(static_cast<int>(scene_.view_indices(ViewRole::train).size()));
    at::globalContext().setFlushDenormal(true);
    config_.model.height = config_.height;
    config_.model.width = config_.width;
    for (const auto& v : scene_.views) backgrounds_.push_back(image_to_tensor(v.image));
    net_ = NeuralTexture(config_.model);
    init_texture_net(net_, config_.seed * 2 + 1);
    opt_g_ = std::make_unique<torch::optim::Adam>(
        net_->parameters(), torch::optim::AdamOptions(config_.lr_g).betas({config_.beta1, config_.beta2}));
    if (config_.adversarial) {
        disc_ = Discriminator(config_.discriminator_width);
        kaiming_init(*disc_, config_.seed * 2 + 2);
        opt_d_ = std::make_unique<torch::optim::Adam>(
            disc_->parameters(), torch::optim::AdamOptions(config_.lr_d).betas({config_.beta1, config_.beta2}));
    }
    vgg_ = VggFeatures(FeatureNetConfig{config_.vgg_width, config_.feature_seed, config_.vgg_weights});
}

Trainer::~Trainer() = default;

TrainSample Trainer::sample() { return make_sample(scene_, mesh_, config_, rng_); }

StepMetrics Trainer::step() {
    std::vector<TrainSample> batch;
    for (int b = 0; b < config_.batch_size; ++b) batch.push_back(sample());
    return train_step(batch);
}

Trainer::Crops Trainer::render_batch(const std::vector<TrainSample>& batch, bool adversarial) {
    Crops out;
    for (const TrainSample& s : batch) {
        const PlacedObject object(mesh_, object_to_world(scene_, s.placement));
        std::vector<const CameraView*> cond;
        for (int v : s.input_views) cond.push_back(&scene_.views[v]);
        const Conditioning c = encode_conditioning(net_, cond);
        std::vector<int> ids = s.input_views;
        ids.insert(ids.end(), s.render_views.begin(), s.render_views.end());
        std::vector<const CameraView*> views;
        std::vector<torch::Tensor> bgs;
        for (int v : ids) {
            views.push_back(&scene_.views[v]);
            bgs.push_back(backgrounds_[v]);
        }
        const std::vector<NeuralRender> renders = render_objects(net_, c, object, views, bgs);
        for (size_t k = 0; k < ids.size(); ++k) {
            const NeuralRender& r = renders[k];
            if (r.empty) continue;
            const int v = ids[k];
            const CropRect rect = centered_crop_rect(r.mask, config_.crop);
            out.rendered.push_back(crop_tensor(r.composite, rect));
            out.reference.push_back(crop_tensor(backgrounds_[v], rect));
            ++out.views;
            // Only render views feed the adversarial terms.
            if (adversarial && k >= s.input_views.size()) {
                auto [real, fake] = sample_patches(backgrounds_[v], r.composite, r.mask, rng_, 1, config_.crop, config_.jitter);
                out.real.push_back(real.crops);
                out.fake.push_back(fake.crops);
                out.fake_views.push_back(v);
            }
        }
    }
    if (out.rendered.empty()) throw TrainingError("no view of the batch covers the object");
    return out;
}

double Trainer::photo_loss(const std::vector<TrainSample>& batch) {
    torch::NoGradGuard guard;
    const Crops c = render_batch(batch, false);
    return (photoconsistency_loss(vgg_, torch::stack(c.rendered), torch::stack(c.reference)) /
            static_cast<double>(batch.size()))
        .item<double>();
}

StepMetrics Trainer::train_step(const std::vector<TrainSample>& batch) {
    net_->train();
    Crops crops = render_batch(batch, config_.adversarial);
    auto& rendered = crops.rendered;
    auto& reference = crops.reference;
    auto& fakes = crops.fake;
    auto& reals = crops.real;
    const int n_views = crops.views;
    adversarial_views_ = crops.fake_views;
    const double bsize = static_cast<double>(batch.size());
    const auto photo = photoconsistency_loss(vgg_, torch::stack(rendered), torch::stack(reference)) / bsize;
    torch::Tensor total = photo, adv, fake_batch;
    if (config_.adversarial && !fakes.empty()) {
        fake_batch = torch::cat(fakes);
        adv = generator_adversarial_loss(disc_->forward(fake_batch));
        total = total_generator_loss(photo, adv, config_.lambda_adv);
    }
    StepMetrics m;
    m.photo = photo.item<double>();
    m.photo_per_view = m.photo * bsize / std::max(1, n_views);
    m.adv = adv.defined() ? adv.item<double>() : 0.0;
    m.total = total.item<double>();
    if (!std::isfinite(m.total)) {
        json dump = {{"iteration", iteration_}, {"samples", json::array()}, {"metrics", to_json(m)}};
        for (const auto& s : batch) dump["samples"].push_back(to_json(s));
        if (!dump_dir_.empty()) std::ofstream(dump_dir_ / "nonfinite_sample.json") << dump.dump(2) << '\n';
        throw TrainingError("non-finite loss at iteration " + std::to_string(iteration_) + ": " + dump.dump());
    }
    opt_g_->zero_grad();
    total.backward();
    opt_g_->step();
    if (config_.adversarial && fake_batch.defined()) {
        opt_d_->zero_grad();
        const auto ld = discriminator_loss(disc_->forward(torch::cat(reals)), disc_->forward(fake_batch.detach()));
        ld.backward();
        opt_d_->step();
        m.disc = ld.item<double>();
    }
    m.iteration = ++iteration_;
    return m;
}

namespace {

std::string optimizer_bytes(torch::optim::Optimizer& opt) {
    torch::serialize::OutputArchive ar;
    opt.save(ar);
    std::ostringstream os;
    ar.save_to(os);
    return os.str();
}

void restore_optimizer(torch::optim::Optimizer& opt, const std::string& bytes) {
    torch::serialize::InputArchive ar;
    std::istringstream is(bytes);
    ar.load_from(is);
    opt.load(ar);
}

}  // namespace

void Trainer::save_state(const std::filesystem::path& path) const {
    CheckpointData d;
    std::ostringstream rng_state;
    rng_state << rng_;
    d.header = {{"kind", "training_state"},
                {"config", to_json(net_->config())},
                {"train", to_json(config_)},
                {"iteration", iteration_},
                {"rng", rng_state.str()}};
    d.tensors = module_state(*net_, "G.");
    if (disc_) {
        auto ds = module_state(*disc_, "D.");
        d.tensors.insert(ds.begin(), ds.end());
        d.blobs["adam_d"] = optimizer_bytes(*opt_d_);
    }
    d.blobs["adam_g"] = optimizer_bytes(*opt_g_);
    write_checkpoint(path, d);
}

void Trainer::load_state(const std::filesystem::path& path) {
    const CheckpointData d = read_checkpoint(path);
    if (d.header.value("kind", "") != "training_state") throw IngestError("not a training state: " + path.string());
    if (to_json(config_) != d.header.at("train")) throw ConfigError("training state was written with another config");
    load_module_state(*net_, d.tensors, "G.");
    restore_optimizer(*opt_g_, d.blobs.at("adam_g"));
    if (disc_) {
        load_module_state(*disc_, d.tensors, "D.");
        restore_optimizer(*opt_d_, d.blobs.at("adam_d"));
    }
    std::istringstream rs(d.header.at("rng").get<std::string>());
    rs >> rng_;
    iteration_ = d.header.at("iteration").get<int64_t>();
}

void Trainer::run(const std::filesystem::path& out_dir, const std::function<void(const StepMetrics&)>& on_step) {
    std::filesystem::create_directories(out_dir / "checkpoints");
    dump_dir_ = out_dir;
    std::ofstream log(out_dir / "metrics.jsonl", std::ios::app);
    while (iteration_ < config_.iterations) {
        const StepMetrics m = step();
        log << to_json(m).dump() << '\n';
        log.flush();
        if (on_step) on_step(m);
        if (m.iteration % config_.checkpoint_every == 0) {
            std::ostringstream name;
            name << "state_" << std::setw(6) << std::setfill('0') << m.iteration << ".camo";
            save_state(out_dir / "checkpoints" / name.str());
        }
    }
    save_state(out_dir / "checkpoints" / "state_final.camo");
    save_neural_texture(out_dir / "model.camo", net_, {{"train", to_json(config_)}, {"iteration", iteration_}});
}

}  // namespace camo
