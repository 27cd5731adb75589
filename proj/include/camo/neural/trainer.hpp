#pragma once

#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <ostream>
#include <vector>

#include <torch/torch.h>

#include "json.hpp"

#include "camo/mesh.hpp"
#include "camo/neural/feature_nets.hpp"
#include "camo/neural/texture_net.hpp"
#include "camo/scene.hpp"

namespace camo {

struct TrainConfig {
    int n_input = 4;
    int n_render = 2;
    int batch_size = 8;
    int iterations = 12000;
    double lr_g = 2e-4;
    double lr_d = 1e-4;
    double beta1 = 0.5;
    double beta2 = 0.999;
    double lambda_adv = 0.5;
    bool adversarial = true;        // false removes the discriminator and L_adv from the graph
    int height = kWorkingHeight;
    int width = kWorkingWidth;
    int crop = 128;
    int jitter = 32;
    uint64_t seed = 0;
    int checkpoint_every = 1000;
    int max_retries = 50;
    bool fixed_placement = false;   // always the anchor placement, no augmentation
    PlacementConfig placement;
    NeuralTextureConfig model;      // height/width are taken from this config
    double vgg_width = 1.0;
    double discriminator_width = 1.0;
    uint64_t feature_seed = 1;
    std::filesystem::path vgg_weights;

    /// Reduced sizes for CPU experiments on the synthetic fixture.
    static TrainConfig toy();

    /// Rejects non-positive rates and sizes and too few training views.
    void validate(int n_train_views) const;
};

nlohmann::json to_json(const TrainConfig& config);
/// Applies the keys present in `j` on top of `base`. Unknown keys and wrong
/// types raise ConfigError.
TrainConfig train_config_from_json(const nlohmann::json& j, TrainConfig base = {});

/// One training example: a placement plus disjoint input and render views
/// (scene view indices).
struct TrainSample {
    Placement placement;
    std::vector<int> input_views;
    std::vector<int> render_views;
};

nlohmann::json to_json(const TrainSample& sample);

/// Draws N_i + N_r train views without replacement and a placement whose
/// object covers at least one pixel in each of them, retrying the placement
/// up to max_retries times (SampleError after that).
TrainSample make_sample(const Scene& scene, const Mesh& mesh, const TrainConfig& config, Rng& rng);

struct StepMetrics {
    int64_t iteration = 0;
    double photo = 0.0;       // summed over views, averaged over the batch
    double photo_per_view = 0.0;
    double adv = 0.0;
    double disc = 0.0;
    double total = 0.0;
};

nlohmann::json to_json(const StepMetrics& m);

/// Alternating generator / discriminator optimization with Adam. Owns the
/// models, optimizers and the sampling stream; state files hold all of them,
/// so a resumed run continues bit-exactly in deterministic mode.
class Trainer {
public:
    Trainer(const Scene& scene, const Mesh& mesh, TrainConfig config);
    ~Trainer();

    TrainSample sample();
    StepMetrics step();
    StepMetrics train_step(const std::vector<TrainSample>& batch);

    /// Photoconsistency loss of the current model on a batch, without updates.
    double photo_loss(const std::vector<TrainSample>& batch);

    /// Scene views whose composites fed the discriminator in the last step.
    const std::vector<int>& adversarial_views() const { return adversarial_views_; }

    /// Runs until config.iterations, appending metrics to out_dir/metrics.jsonl,
    /// writing out_dir/checkpoints/state_<k>.camo every checkpoint_every steps
    /// and out_dir/model.camo at the end.
    void run(const std::filesystem::path& out_dir, const std::function<void(const StepMetrics&)>& on_step = {});

    void save_state(const std::filesystem::path& path) const;
    /// Restores a state written by save_state for the same scene and mesh.
    void load_state(const std::filesystem::path& path);

    NeuralTexture& model() { return net_; }
    Discriminator& discriminator() { return disc_; }
    int64_t iteration() const { return iteration_; }
    const TrainConfig& config() const { return config_; }
    const Scene& scene() const { return scene_; }
    Rng& rng() { return rng_; }

private:
    Scene scene_;
    Mesh mesh_;
    TrainConfig config_;
    std::vector<torch::Tensor> backgrounds_;
    NeuralTexture net_{nullptr};
    Discriminator disc_{nullptr};
    VggFeatures vgg_{nullptr};
    std::unique_ptr<torch::optim::Adam> opt_g_;
    std::unique_ptr<torch::optim::Adam> opt_d_;
    Rng rng_;
    int64_t iteration_ = 0;
    std::filesystem::path dump_dir_;
    std::vector<int> adversarial_views_;

    struct Crops {
        std::vector<torch::Tensor> rendered, reference, real, fake;
        std::vector<int> fake_views;
        int views = 0;
    };
    Crops render_batch(const std::vector<TrainSample>& batch, bool adversarial);
};

}  // namespace camo
