#include "camo/scene.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include <Eigen/Dense>
#include "json.hpp"

#include "camo/errors.hpp"
#include "camo/random.hpp"

namespace camo {

using nlohmann::json;

const char* to_string(ViewRole role) { return role == ViewRole::test ? "test" : "train"; }

ViewRole parse_view_role(const std::string& s) {
    if (s == "train") return ViewRole::train;
    if (s == "test") return ViewRole::test;
    throw ValidationError("unknown view role '" + s + "'");
}

void validate_camera(const CameraView& view, double tol) {
    const Mat3 gram = view.R.transpose() * view.R;
    if ((gram - Mat3::Identity()).cwiseAbs().maxCoeff() > tol || std::abs(view.R.determinant() - 1.0) > tol)
        throw ValidationError("view '" + view.id + "': rotation is not orthonormal with determinant 1");
    const Mat3& K = view.K;
    if (K(1, 0) != 0.0 || K(2, 0) != 0.0 || K(2, 1) != 0.0)
        throw ValidationError("view '" + view.id + "': intrinsics are not upper triangular");
    if (!(K(0, 0) > 0.0) || !(K(1, 1) > 0.0) || K(2, 2) != 1.0)
        throw ValidationError("view '" + view.id + "': intrinsics need positive focal lengths and K[2,2] = 1");
}

std::vector<int> Scene::view_indices(ViewRole role) const {
    std::vector<int> out;
    for (int i = 0; i < static_cast<int>(views.size()); ++i)
        if (views[i].role == role) out.push_back(i);
    return out;
}

const CameraView& Scene::view(const std::string& id) const {
    for (const auto& v : views)
        if (v.id == id) return v;
    throw NotFoundError("no view with id '" + id + "'");
}

void validate_scene(const Scene& scene) {
    if (static_cast<int>(scene.views.size()) < kMinViews)
        throw ValidationError("insufficient views: scene has " + std::to_string(scene.views.size()) +
                              ", need at least " + std::to_string(kMinViews));
    for (const auto& v : scene.views) validate_camera(v);
    if (std::abs(scene.up().norm() - 1.0) > 1e-6) throw ValidationError("ground plane normal is not unit length");
    if (!(scene.reference_length > 0.0)) throw ValidationError("reference_length must be positive");
    if (std::abs(scene.plane_distance(scene.anchor)) > 1e-4 * scene.reference_length)
        throw ValidationError("anchor does not lie on the ground plane");
}

Mat3 rescale_intrinsics(const Mat3& K, double sx, double sy) {
    Mat3 out = K;
    out.row(0) *= sx;
    out.row(1) *= sy;
    return out;
}

Scene resize_scene(const Scene& scene, int height, int width) {
    Scene out = scene;
    for (auto& view : out.views) {
        if (view.height() == height && view.width() == width) continue;
        view.K = rescale_intrinsics(view.K, static_cast<double>(width) / view.width(),
                                    static_cast<double>(height) / view.height());
        view.image = resize(view.image, height, width);
    }
    return out;
}

void bundler_to_view(double focal, const Mat3& bundler_R, const Vec3& bundler_t, int width, int height,
                     CameraView& view) {
    // Bundler: X_c = R X + t, camera looks down -z with y up. Flipping y and z
    // gives x right, y down, z forward.
    const Mat3 flip = Vec3(1.0, -1.0, -1.0).asDiagonal();
    view.R = flip * bundler_R;
    view.t = flip * bundler_t;
    view.K << focal, 0.0, 0.5 * width,
              0.0, focal, 0.5 * height,
              0.0, 0.0, 1.0;
}

std::vector<BundlerCamera> read_bundler_cameras(const std::filesystem::path& bundle_path) {
    std::ifstream in(bundle_path);
    if (!in) throw IngestError("missing bundler file: " + bundle_path.string());
    std::string line;
    // Skip the header comment(s).
    std::streampos body = in.tellg();
    while (std::getline(in, line)) {
        if (!line.empty() && line[0] == '#') {
            body = in.tellg();
            continue;
        }
        break;
    }
    in.seekg(body);
    int n_cameras = 0, n_points = 0;
    if (!(in >> n_cameras >> n_points)) throw IngestError("malformed bundler header: " + bundle_path.string());
    std::vector<BundlerCamera> cams(n_cameras);
    for (auto& c : cams) {
        if (!(in >> c.focal >> c.k1 >> c.k2)) throw IngestError("truncated bundler camera block");
        for (int r = 0; r < 3; ++r)
            for (int k = 0; k < 3; ++k)
                if (!(in >> c.R(r, k))) throw IngestError("truncated bundler camera block");
        for (int k = 0; k < 3; ++k)
            if (!(in >> c.t[k])) throw IngestError("truncated bundler camera block");
    }
    return cams;
}

namespace {

Mat3 read_mat3(const json& j, const std::string& what) {
    if (!j.is_array() || j.size() != 9) throw IngestError(what + " must be a row-major array of 9 numbers");
    Mat3 m;
    for (int i = 0; i < 9; ++i) m(i / 3, i % 3) = j[i].get<double>();
    return m;
}

Vec3 read_vec3(const json& j, const std::string& what) {
    if (!j.is_array() || j.size() != 3) throw IngestError(what + " must be an array of 3 numbers");
    return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

json mat_to_json(const Mat3& m) {
    json a = json::array();
    for (int i = 0; i < 9; ++i) a.push_back(m(i / 3, i % 3));
    return a;
}

void orient_plane(Scene& scene) {
    const double n = scene.ground_plane.head<3>().norm();
    if (!(n > 0.0)) throw ValidationError("ground plane normal is zero");
    scene.ground_plane /= n;
    int below = 0;
    for (const auto& v : scene.views)
        if (scene.plane_distance(v.center()) < 0.0) ++below;
    if (2 * below > static_cast<int>(scene.views.size())) scene.ground_plane = -scene.ground_plane;
}

}  // namespace

Scene load_scene(const std::filesystem::path& manifest_path, const LoadOptions& options) {
    std::ifstream in(manifest_path);
    if (!in) throw IngestError("missing scene manifest: " + manifest_path.string());
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw IngestError("malformed scene manifest " + manifest_path.string() + ": " + e.what());
    }
    const auto base = manifest_path.parent_path();

    Scene scene;
    scene.name = j.value("name", manifest_path.parent_path().filename().string());
    if (!j.contains("views") || !j["views"].is_array()) throw IngestError("manifest has no 'views' array");

    std::vector<BundlerCamera> bundler;
    if (j.contains("bundler")) bundler = read_bundler_cameras(base / j["bundler"].at("bundle").get<std::string>());

    const auto& jviews = j["views"];
    if (static_cast<int>(jviews.size()) < kMinViews)
        throw ValidationError("insufficient views: manifest lists " + std::to_string(jviews.size()) +
                              ", need at least " + std::to_string(kMinViews));
    for (size_t i = 0; i < jviews.size(); ++i) {
        const auto& jv = jviews[i];
        CameraView view;
        view.id = jv.value("id", "view" + std::to_string(i));
        const auto image_path = base / jv.at("image").get<std::string>();
        const Image native = load_image(image_path);
        if (!bundler.empty()) {
            if (i >= bundler.size()) throw IngestError("no bundler camera block for image " + image_path.string());
            const auto& bc = bundler[i];
            if (bc.focal <= 0.0) throw IngestError("bundler camera for " + image_path.string() + " is unregistered");
            bundler_to_view(bc.focal, bc.R, bc.t, native.width, native.height, view);
        } else {
            if (!jv.contains("K") || !jv.contains("R") || !jv.contains("t"))
                throw IngestError("no camera block for image " + image_path.string());
            view.K = read_mat3(jv["K"], "K");
            view.R = read_mat3(jv["R"], "R");
            view.t = read_vec3(jv["t"], "t");
        }
        view.role = parse_view_role(jv.value("role", "train"));
        view.K = rescale_intrinsics(view.K, static_cast<double>(options.width) / native.width,
                                    static_cast<double>(options.height) / native.height);
        view.image = resize(native, options.height, options.width);
        scene.views.push_back(std::move(view));
    }

    const auto& gp = j.at("ground_plane");
    if (!gp.is_array() || gp.size() != 4) throw IngestError("ground_plane must be [a, b, c, d]");
    scene.ground_plane = Vec4(gp[0].get<double>(), gp[1].get<double>(), gp[2].get<double>(), gp[3].get<double>());
    scene.anchor = read_vec3(j.at("anchor"), "anchor");
    scene.reference_length = j.at("reference_length").get<double>();
    orient_plane(scene);
    validate_scene(scene);
    return scene;
}

void save_scene(const Scene& scene, const std::filesystem::path& directory) {
    std::filesystem::create_directories(directory / "images");
    json j;
    j["name"] = scene.name;
    j["ground_plane"] = {scene.ground_plane[0], scene.ground_plane[1], scene.ground_plane[2], scene.ground_plane[3]};
    j["anchor"] = {scene.anchor[0], scene.anchor[1], scene.anchor[2]};
    j["reference_length"] = scene.reference_length;
    j["views"] = json::array();
    for (const auto& v : scene.views) {
        const std::string rel = "images/" + v.id + ".png";
        save_image(directory / rel, v.image);
        j["views"].push_back({{"id", v.id},
                              {"image", rel},
                              {"K", mat_to_json(v.K)},
                              {"R", mat_to_json(v.R)},
                              {"t", {v.t[0], v.t[1], v.t[2]}},
                              {"role", to_string(v.role)}});
    }
    std::ofstream out(directory / "scene.json");
    out << j.dump(2) << '\n';
}

int test_view_count(int n_views) {
    // round half up of N / 10
    const int rounded = (n_views + 5) / 10;
    return std::clamp(rounded, 1, 3);
}

Scene split_views(Scene scene, uint64_t seed) {
    Rng rng(seed);
    const int n = static_cast<int>(scene.views.size());
    const auto chosen = sample_without_replacement(rng, n, test_view_count(n));
    for (auto& v : scene.views) v.role = ViewRole::train;
    for (int i : chosen) scene.views[i].role = ViewRole::test;
    return scene;
}

Placement anchor_placement(const Scene& scene) {
    Placement p;
    p.position = scene.anchor;
    return p;
}

Mat3 plane_frame(const Vec3& up) {
    int axis = 0;
    for (int k = 1; k < 3; ++k)
        if (std::abs(up[k]) < std::abs(up[axis])) axis = k;
    Vec3 a = Vec3::Zero();
    a[axis] = 1.0;
    const Vec3 e1 = (a - a.dot(up) * up).normalized();
    const Vec3 e2 = up.cross(e1);
    Mat3 frame;
    frame.col(0) = e1;
    frame.col(1) = e2;
    frame.col(2) = up;
    return frame;
}

Placement sample_placement(const Scene& scene, Rng& rng, const PlacementConfig& config) {
    const Mat3 frame = plane_frame(scene.up());
    const double radius = config.max_shift * scene.reference_length * std::sqrt(uniform01(rng));
    const double theta = 2.0 * std::numbers::pi * uniform01(rng);
    Placement p;
    p.position = scene.anchor + radius * (std::cos(theta) * frame.col(0) + std::sin(theta) * frame.col(1));
    p.scale = uniform(rng, config.scale_min, config.scale_max);
    p.yaw = config.random_yaw ? 2.0 * std::numbers::pi * uniform01(rng) : 0.0;
    return p;
}

Similarity object_to_world(const Scene& scene, const Placement& placement) {
    Similarity s;
    const double c = std::cos(placement.yaw), sn = std::sin(placement.yaw);
    Mat3 yaw;
    yaw << c, -sn, 0.0, sn, c, 0.0, 0.0, 0.0, 1.0;
    s.rotation = plane_frame(scene.up()) * yaw;
    s.scale = scene.reference_length * placement.scale;
    s.offset = placement.position;
    return s;
}

}  // namespace camo
