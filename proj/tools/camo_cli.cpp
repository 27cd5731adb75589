// camo: command line front end of the camouflage toolkit.

#include <chrono>
#include <csignal>
#include <ctime>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>

#include "CLI11.hpp"
#include "json.hpp"
#include "camo/baselines.hpp"
#include "camo/errors.hpp"
#include "camo/evalkit.hpp"
#include "camo/fixture.hpp"
#include "camo/mesh.hpp"
#include "camo/neural/checkpoint.hpp"
#include "camo/neural/metrics.hpp"
#include "camo/neural/neural_method.hpp"
#include "camo/neural/tensor_bridge.hpp"
#include "camo/neural/trainer.hpp"
#include "camo/server.hpp"
#include "camo/study.hpp"
#include "camo/texture_io.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace camo;

namespace {

std::vector<std::string> g_argv;

struct SceneArgs {
    fs::path scene;
    fs::path mesh;
    int height = kWorkingHeight;
    int width = kWorkingWidth;
    std::optional<uint64_t> placement_seed;

    void add(CLI::App* app, bool with_size = true) {
        app->add_option("--scene", scene, "scene directory or manifest")->required();
        app->add_option("--mesh", mesh, "object mesh (OBJ); the unit cuboid when omitted");
        app->add_option("--placement-seed", placement_seed, "sample a random placement instead of the anchor");
        if (with_size) {
            app->add_option("--height", height, "working image height");
            app->add_option("--width", width, "working image width");
        }
    }

    Scene load(int h, int w) const {
        const fs::path manifest = fs::is_directory(scene) ? scene / "scene.json" : scene;
        return load_scene(manifest, {.height = h, .width = w});
    }
    Scene load() const { return load(height, width); }

    Mesh load_mesh() const { return mesh.empty() ? make_cuboid() : normalize_to_object_space(load_obj(mesh)); }

    Placement placement(const Scene& s) const {
        if (!placement_seed) return anchor_placement(s);
        Rng rng(*placement_seed);
        return sample_placement(s, rng);
    }

    json to_json() const {
        json j = {{"scene", scene.string()}, {"mesh", mesh.empty() ? "cuboid" : mesh.string()}};
        if (placement_seed) j["placement_seed"] = *placement_seed;
        return j;
    }
};

json placement_json(const Placement& p) {
    return {{"position", {p.position.x(), p.position.y(), p.position.z()}}, {"scale", p.scale}, {"yaw", p.yaw}};
}

std::string timestamp() {
    const std::time_t t = std::time(nullptr);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
    return buf;
}

/// Resolved configuration and version stamp written next to every output.
void write_run_manifest(const fs::path& dir, const std::string& command, const json& config) {
    fs::create_directories(dir);
    const json m = {{"command", command},      {"argv", g_argv},           {"config", config},
                    {"version", CAMO_VERSION}, {"git", CAMO_GIT_STAMP},    {"created", timestamp()}};
    std::ofstream(dir / ("run_" + command + ".json")) << m.dump(2) << '\n';
}

void log_line(const json& j) { std::cout << j.dump() << std::endl; }

bool is_neural(const std::string& method) { return method == "neural"; }

struct NeuralModel {
    NeuralTexture net{nullptr};
    int n_input = 4;
};

NeuralModel load_model(const fs::path& path) {
    if (path.empty()) throw ConfigError("--model is required for the neural method");
    NeuralModel m;
    m.net = load_neural_texture(path);
    const json header = read_checkpoint(path).header;
    if (header.contains("extra") && header["extra"].contains("train"))
        m.n_input = header["extra"]["train"].value("n_input", 4);
    else if (header.contains("train"))
        m.n_input = header["train"].value("n_input", 4);
    return m;
}

/// Composite of a method in scene.views[view].
struct Rendered {
    Image image;
    Mask mask;
};

class MethodRenderer {
public:
    MethodRenderer(const Scene& scene, const Mesh& mesh, const Placement& placement, std::string method, uint64_t seed,
                   const fs::path& model, const fs::path& texture_dir, const BaselineOptions& options)
        : scene_(scene), mesh_(mesh), placement_(placement), method_(std::move(method)) {
        if (!texture_dir.empty()) {
            texture_ = load_texture(texture_dir, scene, mesh, placement);
        } else if (is_neural(method_)) {
            model_ = load_model(model);
            conditioning_ = conditioning_views(scene, model_.n_input);
        } else {
            texture_ = run_baseline(parse_baseline_method(method_), scene, mesh, placement, seed, options);
        }
    }

    Rendered render(int view) {
        if (texture_) {
            const Composite c = render_texture(scene_.views[view], mesh_, object_to_world(scene_, placement_), *texture_);
            return {c.image, c.mask};
        }
        const NeuralComposite c = render_neural(model_.net, scene_, mesh_, placement_, view, conditioning_);
        const CameraView& v = scene_.views[view];
        if (c.image.height == v.height() && c.image.width == v.width()) return {c.image, c.mask};
        // The network works at its own resolution: paste its upsampled colors
        // into the object mask at the view's resolution.
        const Image up = resize(c.image, v.height(), v.width());
        const DepthMap d = render_depth(mesh_, object_to_world(scene_, placement_), v, v.height(), v.width());
        Rendered r{v.image, d.mask};
        for (int y = 0; y < v.height(); ++y)
            for (int x = 0; x < v.width(); ++x)
                if (d.mask.at(y, x)) r.image.set_pixel(y, x, up.pixel(y, x));
        return r;
    }

private:
    const Scene& scene_;
    const Mesh& mesh_;
    Placement placement_;
    std::string method_;
    std::optional<SurfaceTextureMap> texture_;
    NeuralModel model_;
    std::vector<int> conditioning_;
};

std::vector<int> select_views(const Scene& s, const std::vector<std::string>& ids) {
    std::vector<int> out;
    if (ids.empty()) return s.view_indices(ViewRole::test);
    for (const auto& id : ids) {
        bool found = false;
        for (size_t i = 0; i < s.views.size(); ++i)
            if (s.views[i].id == id) {
                out.push_back(static_cast<int>(i));
                found = true;
            }
        if (!found) throw ConfigError("scene has no view '" + id + "'");
    }
    return out;
}

BaselineOptions baseline_options(int atlas_resolution, std::optional<int> table_view) {
    BaselineOptions o;
    o.domain.atlas_resolution = atlas_resolution;
    o.domain.table_view = table_view;
    return o;
}

json read_json_file(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file " + path.string());
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw ConfigError("malformed config file " + path.string() + ": " + e.what());
    }
}

StudyServer* g_server = nullptr;
void stop_server(int) {
    if (g_server) g_server->stop();
}

}  // namespace

int run(int argc, char** argv) {
    CLI::App app{"Multi-view camouflage toolkit"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(CAMO_VERSION) + " (" + CAMO_GIT_STAMP + ")");

    // ingest
    auto* ingest = app.add_subcommand("ingest", "import a scene manifest (or generate the synthetic fixture)");
    fs::path ingest_manifest, ingest_out;
    bool ingest_fixture = false;
    FixtureOptions fixture;
    int ingest_h = kWorkingHeight, ingest_w = kWorkingWidth;
    auto* manifest_opt = ingest->add_option("--manifest", ingest_manifest, "scene manifest JSON");
    ingest->add_flag("--fixture", ingest_fixture, "generate the procedural fixture scene")->excludes(manifest_opt);
    ingest->add_option("--fixture-views", fixture.n_views, "fixture camera count");
    ingest->add_option("--fixture-seed", fixture.seed, "fixture texture seed");
    ingest->add_option("--height", ingest_h, "working image height");
    ingest->add_option("--width", ingest_w, "working image width");
    ingest->add_option("--out", ingest_out, "output scene directory")->required();

    // split
    auto* split = app.add_subcommand("split", "reserve test views");
    fs::path split_scene, split_out;
    uint64_t split_seed = 0;
    split->add_option("--scene", split_scene, "scene directory or manifest")->required();
    split->add_option("--seed", split_seed, "selection seed");
    split->add_option("--out", split_out, "output scene directory (defaults to the input)");

    // train
    auto* train = app.add_subcommand("train", "train a neural camouflage texture");
    SceneArgs train_scene;
    train_scene.add(train, false);
    fs::path train_config, train_out, train_resume;
    bool train_toy = false;
    std::optional<int> train_iterations;
    std::optional<uint64_t> train_seed;
    std::optional<double> train_lambda;
    train->add_option("--config", train_config, "training config JSON (any TrainConfig field)");
    train->add_flag("--toy", train_toy, "start from the reduced CPU configuration");
    train->add_option("--iterations", train_iterations, "override iterations");
    train->add_option("--seed", train_seed, "override seed");
    train->add_option("--lambda-adv", train_lambda, "override the adversarial weight");
    train->add_option("--resume", train_resume, "training state to resume from");
    train->add_option("--out", train_out, "output directory")->required();

    // texture
    auto* texture = app.add_subcommand("texture", "compute and export a surface texture");
    SceneArgs tex_scene;
    tex_scene.add(texture);
    std::string tex_method;
    fs::path tex_model, tex_out;
    uint64_t tex_seed = 0;
    int tex_res = 256;
    std::optional<int> tex_table_view;
    texture->add_option("--method", tex_method, "mean|random|greedy|pixelgreedy|bmrf|imrf|neural")->required();
    texture->add_option("--model", tex_model, "neural model file");
    texture->add_option("--seed", tex_seed, "method seed");
    texture->add_option("--atlas-resolution", tex_res, "texels per cuboid face side");
    texture->add_option("--table-view", tex_table_view, "view index carrying the color table of a non-cuboid mesh");
    texture->add_option("--out", tex_out, "output texture directory")->required();

    // render
    auto* render = app.add_subcommand("render", "composite a textured object into scene views");
    SceneArgs ren_scene;
    ren_scene.add(render);
    std::string ren_method;
    fs::path ren_model, ren_texture, ren_out;
    uint64_t ren_seed = 0;
    int ren_res = 256;
    std::vector<std::string> ren_views;
    auto* ren_method_opt = render->add_option("--method", ren_method, "method computed on the fly");
    render->add_option("--texture", ren_texture, "texture directory from `texture`")->excludes(ren_method_opt);
    render->add_option("--model", ren_model, "neural model file");
    render->add_option("--seed", ren_seed, "method seed");
    render->add_option("--atlas-resolution", ren_res, "texels per cuboid face side");
    render->add_option("--view", ren_views, "view ids (default: the test views)");
    render->add_option("--out", ren_out, "output directory")->required();

    // eval
    auto* eval = app.add_subcommand("eval", "score methods on the reserved test views");
    SceneArgs ev_scene;
    ev_scene.add(eval);
    std::vector<std::string> ev_methods;
    fs::path ev_model, ev_out;
    uint64_t ev_seed = 0;
    int ev_res = 256;
    eval->add_option("--method", ev_methods, "methods to score")->required();
    eval->add_option("--model", ev_model, "neural model file");
    eval->add_option("--seed", ev_seed, "method seed");
    eval->add_option("--atlas-resolution", ev_res, "texels per cuboid face side");
    eval->add_option("--out", ev_out, "output directory")->required();

    // build-study
    auto* build = app.add_subcommand("build-study", "render study assets for a set of scenes and methods");
    std::vector<fs::path> bs_scenes;
    std::vector<std::string> bs_methods, bs_models;
    fs::path bs_mesh, bs_out;
    uint64_t bs_seed = 0;
    int bs_res = 256, bs_training = 5;
    double bs_limit = kStudyTimeLimit;
    build->add_option("--scene", bs_scenes, "scene directories")->required();
    build->add_option("--method", bs_methods, "methods")->required();
    build->add_option("--model", bs_models, "neural models as <scene name>=<model file>");
    build->add_option("--mesh", bs_mesh, "object mesh (OBJ); the unit cuboid when omitted");
    build->add_option("--seed", bs_seed, "method seed");
    build->add_option("--atlas-resolution", bs_res, "texels per cuboid face side");
    build->add_option("--training-trials", bs_training, "practice trials per participant");
    build->add_option("--time-limit", bs_limit, "seconds per trial");
    build->add_option("--out", bs_out, "asset directory")->required();

    // serve-study
    auto* serve = app.add_subcommand("serve-study", "run the study HTTP service");
    fs::path sv_assets, sv_log, sv_static;
    ServerOptions sv_opts;
    uint64_t sv_seed = 0;
    serve->add_option("--assets", sv_assets, "asset directory from build-study")->required();
    serve->add_option("--log", sv_log, "response log (JSONL, appended; replayed on start)")->required();
    serve->add_option("--host", sv_opts.host, "bind address");
    serve->add_option("--port", sv_opts.port, "port (0 picks one)");
    serve->add_option("--admin-token", sv_opts.admin_token, "token for /results.csv");
    serve->add_option("--static", sv_static, "participant client bundle");
    serve->add_option("--seed", sv_seed, "trial assignment seed");

    // report
    auto* report = app.add_subcommand("report", "aggregate study logs and metric records");
    fs::path rp_log, rp_out;
    std::vector<fs::path> rp_metrics;
    report->add_option("--log", rp_log, "study response log");
    report->add_option("--metrics", rp_metrics, "metric record files (metrics.jsonl from eval)");
    report->add_option("--out", rp_out, "output directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        throw ConfigError(e.what());
    }

    if (*ingest) {
        if (!ingest_fixture && ingest_manifest.empty()) throw ConfigError("ingest needs --manifest or --fixture");
        Scene s;
        if (ingest_fixture) {
            fixture.height = ingest_h;
            fixture.width = ingest_w;
            s = make_fixture_scene(fixture);
        } else {
            s = load_scene(ingest_manifest, {.height = ingest_h, .width = ingest_w});
        }
        save_scene(s, ingest_out);
        write_run_manifest(ingest_out, "ingest",
                           {{"source", ingest_fixture ? "fixture" : ingest_manifest.string()},
                            {"height", ingest_h},
                            {"width", ingest_w},
                            {"views", s.views.size()}});
        log_line({{"event", "ingested"}, {"scene", s.name}, {"views", s.views.size()}, {"out", ingest_out.string()}});
    } else if (*split) {
        const fs::path manifest = fs::is_directory(split_scene) ? split_scene / "scene.json" : split_scene;
        const fs::path out = split_out.empty() ? manifest.parent_path() : split_out;
        // Keep the stored resolution.
        std::ifstream probe(manifest);
        if (!probe) throw IngestError("missing scene manifest: " + manifest.string());
        const json mj = json::parse(probe);
        const Image first = load_image(manifest.parent_path() / mj.at("views").at(0).at("image").get<std::string>());
        const Scene s = split_views(load_scene(manifest, {.height = first.height, .width = first.width}), split_seed);
        save_scene(s, out);
        json test = json::array();
        for (int v : s.view_indices(ViewRole::test)) test.push_back(s.views[v].id);
        write_run_manifest(out, "split", {{"scene", manifest.string()}, {"seed", split_seed}, {"test_views", test}});
        log_line({{"event", "split"}, {"test_views", test}});
    } else if (*train) {
        TrainConfig config = train_toy ? TrainConfig::toy() : TrainConfig{};
        if (!train_config.empty()) config = train_config_from_json(read_json_file(train_config), config);
        if (train_iterations) config.iterations = *train_iterations;
        if (train_seed) config.seed = *train_seed;
        if (train_lambda) config.lambda_adv = *train_lambda;
        enable_deterministic_mode();
        const Scene s = train_scene.load(config.height, config.width);
        const Mesh mesh = train_scene.load_mesh();
        Trainer trainer(s, mesh, config);
        if (!train_resume.empty()) trainer.load_state(train_resume);
        write_run_manifest(train_out, "train", {{"scene", train_scene.to_json()}, {"train", to_json(config)}});
        const auto t0 = std::chrono::steady_clock::now();
        trainer.run(train_out, [&](const StepMetrics& m) {
            if (m.iteration % 50 == 0 || m.iteration == config.iterations) {
                json j = to_json(m);
                j["event"] = "step";
                j["seconds"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
                log_line(j);
            }
        });
        log_line({{"event", "trained"}, {"model", (train_out / "model.camo").string()}});
    } else if (*texture) {
        const Scene s = tex_scene.load();
        const Mesh mesh = tex_scene.load_mesh();
        const Placement pl = tex_scene.placement(s);
        const BaselineOptions opt = baseline_options(tex_res, tex_table_view);
        SurfaceTextureMap tex;
        if (is_neural(tex_method)) {
            NeuralModel m = load_model(tex_model);
            tex = neural_texture_map(m.net, s, mesh, pl, conditioning_views(s, m.n_input), opt.domain);
        } else {
            tex = run_baseline(parse_baseline_method(tex_method), s, mesh, pl, tex_seed, opt);
        }
        const json meta = {{"method", tex_method}, {"seed", tex_seed}, {"placement", placement_json(pl)}};
        save_texture(tex_out, tex, meta);
        write_run_manifest(tex_out, "texture",
                           {{"scene", tex_scene.to_json()},
                            {"method", tex_method},
                            {"seed", tex_seed},
                            {"atlas_resolution", tex_res},
                            {"model", tex_model.string()}});
        log_line({{"event", "texture"}, {"sites", tex.sites.size()}, {"out", tex_out.string()}});
    } else if (*render) {
        if (ren_method.empty() && ren_texture.empty()) throw ConfigError("render needs --method or --texture");
        const Scene s = ren_scene.load();
        const Mesh mesh = ren_scene.load_mesh();
        const Placement pl = ren_scene.placement(s);
        MethodRenderer renderer(s, mesh, pl, ren_method, ren_seed, ren_model, ren_texture,
                                baseline_options(ren_res, std::nullopt));
        fs::create_directories(ren_out);
        json written = json::array();
        for (int v : select_views(s, ren_views)) {
            const Rendered r = renderer.render(v);
            save_image(ren_out / (s.views[v].id + ".png"), r.image);
            save_mask(ren_out / (s.views[v].id + "_mask.png"), r.mask);
            written.push_back(s.views[v].id);
        }
        write_run_manifest(ren_out, "render",
                           {{"scene", ren_scene.to_json()},
                            {"method", ren_method},
                            {"texture", ren_texture.string()},
                            {"model", ren_model.string()},
                            {"seed", ren_seed},
                            {"views", written}});
        log_line({{"event", "rendered"}, {"views", written}});
    } else if (*eval) {
        const Scene s = ev_scene.load();
        const Mesh mesh = ev_scene.load_mesh();
        const Placement pl = ev_scene.placement(s);
        const std::vector<int> views = s.view_indices(ViewRole::test);
        if (views.empty()) throw ConfigError("scene has no test views; run `split` first");
        MetricSuite suite;
        std::vector<MetricRecord> records;
        fs::create_directories(ev_out);
        std::ofstream jsonl(ev_out / "metrics.jsonl");
        for (const auto& method : ev_methods) {
            MethodRenderer renderer(s, mesh, pl, method, ev_seed, ev_model, {}, baseline_options(ev_res, std::nullopt));
            for (int v : views) {
                const Rendered r = renderer.render(v);
                records.push_back(suite.evaluate(s, v, r.image, r.mask, method));
                const MetricRecord& m = records.back();
                jsonl << json{{"scene", m.scene}, {"view", m.view}, {"method", m.method},
                              {"perceptual", m.perceptual}, {"sifid", m.sifid}}
                             .dump()
                      << '\n';
            }
        }
        const std::string csv = metric_records_csv(records);
        std::ofstream(ev_out / "metrics.csv") << csv;
        std::ofstream(ev_out / "summary.md") << metric_summary_markdown(summarize_metrics(records));
        write_run_manifest(ev_out, "eval",
                           {{"scene", ev_scene.to_json()}, {"methods", ev_methods}, {"seed", ev_seed}, {"model", ev_model.string()}});
        std::cout << csv;
    } else if (*build) {
        std::map<std::string, fs::path> models;
        for (const auto& spec : bs_models) {
            const auto eq = spec.find('=');
            if (eq == std::string::npos) throw ConfigError("--model expects <scene name>=<model file>, got " + spec);
            models[spec.substr(0, eq)] = spec.substr(eq + 1);
        }
        StudyManifest manifest;
        manifest.time_limit = bs_limit;
        manifest.training_trials = bs_training;
        manifest.methods = bs_methods;
        const Mesh mesh = bs_mesh.empty() ? make_cuboid() : normalize_to_object_space(load_obj(bs_mesh));
        for (const auto& dir : bs_scenes) {
            const Scene s = load_scene(fs::is_directory(dir) ? dir / "scene.json" : dir);
            const std::vector<int> tests = s.view_indices(ViewRole::test);
            if (tests.empty()) throw ConfigError("scene " + s.name + " has no test views; run `split` first");
            const int view = tests.front();
            const Placement pl = anchor_placement(s);
            manifest.scenes.push_back(s.name);
            for (const auto& method : bs_methods) {
                fs::path model;
                if (is_neural(method)) {
                    if (!models.count(s.name)) throw ConfigError("no --model given for scene " + s.name);
                    model = models[s.name];
                }
                MethodRenderer renderer(s, mesh, pl, method, bs_seed, model, {}, baseline_options(bs_res, std::nullopt));
                const Rendered r = renderer.render(view);
                StudyAsset a{s.name, s.views[view].id, method, fs::path(s.name) / (method + ".png"),
                             fs::path(s.name) / (method + "_mask.png")};
                save_image(bs_out / a.image, r.image);
                save_mask(bs_out / a.mask, r.mask);
                manifest.assets.push_back(a);
            }
        }
        manifest.save(bs_out);
        write_run_manifest(bs_out, "build-study",
                           {{"scenes", manifest.scenes}, {"methods", bs_methods}, {"seed", bs_seed}, {"time_limit", bs_limit}});
        log_line({{"event", "study_built"}, {"assets", manifest.assets.size()}, {"out", bs_out.string()}});
    } else if (*serve) {
        StudyService service(StudyManifest::load(sv_assets), sv_assets, sv_log, sv_seed);
        sv_opts.static_dir = sv_static;
        StudyServer server(service, sv_opts);
        g_server = &server;
        std::signal(SIGINT, stop_server);
        std::signal(SIGTERM, stop_server);
        const int port = server.start();
        write_run_manifest(sv_log.has_parent_path() ? sv_log.parent_path() : fs::path("."), "serve-study",
                           {{"assets", sv_assets.string()}, {"log", sv_log.string()}, {"host", sv_opts.host}, {"port", port}});
        log_line({{"event", "serving"}, {"host", sv_opts.host}, {"port", port}});
        server.run();
        g_server = nullptr;
    } else if (*report) {
        if (rp_log.empty() && rp_metrics.empty()) throw ConfigError("report needs --log and/or --metrics");
        fs::create_directories(rp_out);
        json outputs = json::array();
        if (!rp_log.empty()) {
            const auto responses = read_response_log(rp_log);
            const StudyTable table = aggregate_study(responses);
            std::ofstream(rp_out / "study_table.csv") << study_table_csv(table);
            std::ofstream(rp_out / "study_table.md") << study_table_markdown(table);
            write_study_plots(table, responses, rp_out / "plots");
            for (const auto& w : table.warnings) log_line({{"event", "warning"}, {"message", w}});
            outputs.push_back("study_table.csv");
        }
        if (!rp_metrics.empty()) {
            std::vector<MetricRecord> records;
            for (const auto& f : rp_metrics) {
                std::ifstream in(f);
                if (!in) throw IngestError("missing metric records: " + f.string());
                for (std::string line; std::getline(in, line);) {
                    if (line.empty()) continue;
                    const json j = json::parse(line);
                    records.push_back({j.at("scene"), j.at("view"), j.at("method"), j.at("perceptual"), j.at("sifid")});
                }
            }
            std::ofstream(rp_out / "metrics.csv") << metric_records_csv(records);
            std::ofstream(rp_out / "metrics_summary.md") << metric_summary_markdown(summarize_metrics(records));
            outputs.push_back("metrics_summary.md");
        }
        write_run_manifest(rp_out, "report", {{"log", rp_log.string()}, {"metrics", json(rp_metrics)}});
        log_line({{"event", "report"}, {"outputs", outputs}});
    }
    return 0;
}

int main(int argc, char** argv) {
    g_argv.assign(argv, argv + argc);
    const auto fail = [](int code, const std::string& kind, const std::string& message) {
        std::cerr << json{{"error", kind}, {"message", message}, {"exit_code", code}}.dump() << std::endl;
        return code;
    };
    try {
        return run(argc, argv);
    } catch (const ConfigError& e) {
        return fail(2, e.kind(), e.what());
    } catch (const Error& e) {
        return fail(1, e.kind(), e.what());
    } catch (const json::exception& e) {
        return fail(1, "json", e.what());
    } catch (const std::exception& e) {
        return fail(1, "runtime", e.what());
    }
}
