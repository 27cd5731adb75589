#include "doctest.h"

#include <fstream>

#include "json.hpp"

#include "camo/errors.hpp"
#include "camo/fixture.hpp"
#include "camo/geometry.hpp"
#include "camo/scene.hpp"
#include "temp_dir.hpp"

using namespace camo;
using testing_support::TempDir;

namespace {

FixtureOptions small_fixture(int n_views = 10) {
    FixtureOptions o;
    o.height = 48;
    o.width = 72;
    o.n_views = n_views;
    o.supersample = 1;
    return o;
}

LoadOptions load_at(int h, int w) {
    LoadOptions o;
    o.height = h;
    o.width = w;
    return o;
}

}  // namespace

TEST_CASE("load_scene keeps every listed view") {
    TempDir dir;
    write_fixture_scene(dir.path(), small_fixture(10));
    const Scene s = load_scene(dir / "scene.json", load_at(48, 72));
    CHECK(s.views.size() == 10);
    for (const auto& v : s.views) {
        CHECK(v.height() == 48);
        CHECK(v.width() == 72);
    }
}

TEST_CASE("load_scene resizes to the working resolution and rescales intrinsics") {
    TempDir dir;
    const Scene native = make_fixture_scene(small_fixture(5));
    save_scene(native, dir.path());
    const Scene half = load_scene(dir / "scene.json", load_at(24, 144));
    Rng rng(3);
    for (size_t i = 0; i < native.views.size(); ++i) {
        CHECK(half.views[i].height() == 24);
        CHECK(half.views[i].width() == 144);
        for (int k = 0; k < 20; ++k) {
            const Vec3 x(uniform(rng, -1, 1), uniform(rng, -1, 1), uniform(rng, 0, 1));
            const auto a = project(x, native.views[i]);
            const auto b = project(x, half.views[i]);
            CHECK(std::abs(a.pixel.x() / 72.0 - b.pixel.x() / 144.0) < 1e-6);
            CHECK(std::abs(a.pixel.y() / 48.0 - b.pixel.y() / 24.0) < 1e-6);
        }
    }
}

TEST_CASE("load_scene is idempotent") {
    TempDir dir;
    write_fixture_scene(dir.path(), small_fixture(4));
    const Scene a = load_scene(dir / "scene.json", load_at(40, 60));
    const Scene b = load_scene(dir / "scene.json", load_at(40, 60));
    for (size_t i = 0; i < a.views.size(); ++i) {
        CHECK(a.views[i].K == b.views[i].K);
        CHECK(a.views[i].R == b.views[i].R);
        CHECK(a.views[i].t == b.views[i].t);
        CHECK(a.views[i].image == b.views[i].image);
    }
}

TEST_CASE("load_scene errors") {
    TempDir dir;
    write_fixture_scene(dir.path(), small_fixture(4));
    nlohmann::json j;
    std::ifstream(dir / "scene.json") >> j;

    SUBCASE("fewer than four views") {
        auto k = j;
        k["views"].erase(k["views"].begin());
        std::ofstream(dir / "three.json") << k.dump();
        try {
            load_scene(dir / "three.json", load_at(48, 72));
            FAIL("expected a validation error");
        } catch (const ValidationError& e) {
            CHECK(std::string(e.what()).find("insufficient views") != std::string::npos);
        }
    }
    SUBCASE("missing image names the file") {
        auto k = j;
        k["views"][2]["image"] = "images/nowhere.png";
        std::ofstream(dir / "missing.json") << k.dump();
        try {
            load_scene(dir / "missing.json", load_at(48, 72));
            FAIL("expected an ingest error");
        } catch (const IngestError& e) {
            CHECK(std::string(e.what()).find("nowhere.png") != std::string::npos);
        }
    }
    SUBCASE("non-orthonormal rotation") {
        auto k = j;
        k["views"][1]["R"][0] = k["views"][1]["R"][0].get<double>() + 1e-3;
        std::ofstream(dir / "skew.json") << k.dump();
        CHECK_THROWS_AS(load_scene(dir / "skew.json", load_at(48, 72)), ValidationError);
    }
    SUBCASE("missing camera block") {
        auto k = j;
        k["views"][0].erase("K");
        std::ofstream(dir / "nocam.json") << k.dump();
        CHECK_THROWS_AS(load_scene(dir / "nocam.json", load_at(48, 72)), IngestError);
    }
}

TEST_CASE("Bundler import matches a hand-converted camera") {
    TempDir dir;
    const Scene fx = make_fixture_scene(small_fixture(4));
    save_scene(fx, dir.path());
    // Camera 0: rotation by +90 degrees about x, t = (0.5, -1, 2), f = 80.
    std::ofstream(dir / "bundle.out") << "# Bundle file v0.3\n4 0\n"
                                      << "80 0 0\n1 0 0\n0 0 -1\n0 1 0\n0.5 -1 2\n"
                                      << "80 0 0\n1 0 0\n0 1 0\n0 0 1\n0 0 5\n"
                                      << "80 0 0\n1 0 0\n0 1 0\n0 0 1\n0 0 6\n"
                                      << "80 0 0\n1 0 0\n0 1 0\n0 0 1\n0 0 7\n";
    nlohmann::json j;
    std::ifstream(dir / "scene.json") >> j;
    for (auto& v : j["views"]) {
        v.erase("K");
        v.erase("R");
        v.erase("t");
    }
    j["bundler"] = {{"bundle", "bundle.out"}};
    std::ofstream(dir / "bundler.json") << j.dump();
    const Scene s = load_scene(dir / "bundler.json", load_at(48, 72));
    const CameraView& v = s.views[0];
    Mat3 K, R;
    K << 80, 0, 36, 0, 80, 24, 0, 0, 1;
    R << 1, 0, 0, 0, 0, 1, 0, -1, 0;
    CHECK((v.K - K).norm() < 1e-6);
    CHECK((v.R - R).norm() < 1e-6);
    CHECK((v.t - Vec3(0.5, 1, -2)).norm() < 1e-6);
    // Bundler projection of a visible point: P = R X + t, p = -P / P_z, pixel
    // offset from the image center is f p with y up.
    const Vec3 Xv(0.1, -4.0, 0.2);
    const Vec3 Pv(Xv.x() + 0.5, -Xv.z() - 1.0, Xv.y() + 2.0);
    REQUIRE(Pv.z() < 0.0);
    const double px = -Pv.x() / Pv.z(), py = -Pv.y() / Pv.z();
    const auto proj = project(Xv, v);
    CHECK(proj.pixel.x() == doctest::Approx(36.0 + 80.0 * px).epsilon(1e-9));
    CHECK(proj.pixel.y() == doctest::Approx(24.0 - 80.0 * py).epsilon(1e-9));
}

TEST_CASE("split_views") {
    CHECK(test_view_count(10) == 1);
    CHECK(test_view_count(25) == 3);
    CHECK(test_view_count(4) == 1);
    CHECK(test_view_count(15) == 2);
    CHECK(test_view_count(100) == 3);
    const Scene s = make_fixture_scene(small_fixture(10));
    const Scene a = split_views(s, 5), b = split_views(s, 5);
    int tests = 0;
    for (size_t i = 0; i < a.views.size(); ++i) {
        CHECK(a.views[i].role == b.views[i].role);
        tests += a.views[i].role == ViewRole::test;
    }
    CHECK(tests == 1);
    bool differs = false;
    for (uint64_t seed = 6; seed < 20; ++seed) {
        const Scene c = split_views(s, seed);
        for (size_t i = 0; i < c.views.size(); ++i) {
            CHECK(c.views[i].K == s.views[i].K);
            CHECK(c.views[i].R == s.views[i].R);
            CHECK(c.views[i].t == s.views[i].t);
            differs = differs || c.views[i].role != a.views[i].role;
        }
    }
    CHECK(differs);
}

TEST_CASE("sample_placement is area-uniform on the disk") {
    Scene s = make_fixture_scene(small_fixture(4));
    s.reference_length = 0.5;
    s.anchor = Vec3(1.0, -2.0, 0.0);
    Rng rng(11);
    const int n = 100000;
    Vec3 sum = Vec3::Zero();
    int inner = 0;
    for (int i = 0; i < n; ++i) {
        const Placement p = sample_placement(s, rng);
        const double r = (p.position - s.anchor).norm();
        REQUIRE(r <= 3.0 * s.reference_length + 1e-12);
        REQUIRE(std::abs(s.plane_distance(p.position)) < 1e-4 * s.reference_length);
        REQUIRE(p.scale >= 0.8);
        REQUIRE(p.scale <= 1.2);
        sum += p.position;
        inner += r <= 1.5 * s.reference_length;
    }
    CHECK((sum / n - s.anchor).norm() < 0.05 * s.reference_length);
    CHECK(std::abs(static_cast<double>(inner) / n - 0.25) < 0.01);
}

TEST_CASE("sample_placement yaw is uniform when enabled") {
    const Scene s = make_fixture_scene(small_fixture(4));
    Rng rng(12);
    PlacementConfig cfg;
    cfg.random_yaw = true;
    double mean = 0.0;
    for (int i = 0; i < 20000; ++i) {
        const Placement p = sample_placement(s, rng, cfg);
        REQUIRE(p.yaw >= 0.0);
        REQUIRE(p.yaw < 2.0 * M_PI);
        mean += p.yaw / 20000;
    }
    CHECK(std::abs(mean - M_PI) < 0.05);
}

TEST_CASE("ground plane is oriented towards the cameras") {
    TempDir dir;
    write_fixture_scene(dir.path(), small_fixture(4));
    nlohmann::json j;
    std::ifstream(dir / "scene.json") >> j;
    j["ground_plane"] = {0.0, 0.0, -2.0, 0.0};
    std::ofstream(dir / "flipped.json") << j.dump();
    const Scene s = load_scene(dir / "flipped.json", load_at(48, 72));
    CHECK((s.up() - Vec3(0, 0, 1)).norm() < 1e-12);
}
