#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "camo/baselines.hpp"
#include "camo/errors.hpp"
#include "camo/evalkit.hpp"
#include "camo/fixture.hpp"
#include "camo/geometry.hpp"
#include "camo/mesh.hpp"
#include "camo/stats.hpp"
#include "camo/study.hpp"

namespace py = pybind11;
using namespace camo;

namespace {

py::array_t<float> image_array(const Image& img) {
    py::array_t<float> a({img.height, img.width, 3});
    std::copy(img.data.begin(), img.data.end(), a.mutable_data());
    return a;
}

Image array_image(const py::array_t<float, py::array::c_style | py::array::forcecast>& a) {
    if (a.ndim() != 3 || a.shape(2) != 3) throw ShapeError("expected an (H, W, 3) array");
    Image img(static_cast<int>(a.shape(0)), static_cast<int>(a.shape(1)));
    std::copy(a.data(), a.data() + a.size(), img.data.begin());
    return img;
}

py::array_t<bool> mask_array(const Mask& m) {
    py::array_t<bool> a({m.height, m.width});
    for (size_t i = 0; i < m.data.size(); ++i) a.mutable_data()[i] = m.data[i] != 0;
    return a;
}

Mask array_mask(const py::array_t<bool, py::array::c_style | py::array::forcecast>& a) {
    if (a.ndim() != 2) throw ShapeError("expected an (H, W) mask");
    Mask m(static_cast<int>(a.shape(0)), static_cast<int>(a.shape(1)));
    for (py::ssize_t i = 0; i < a.size(); ++i) m.data[i] = a.data()[i] ? 1 : 0;
    return m;
}

Mesh mesh_or_cuboid(const std::optional<std::filesystem::path>& obj) {
    return obj ? normalize_to_object_space(load_obj(*obj)) : make_cuboid();
}

py::dict test_dict(const TestResult& r) {
    py::dict d;
    d["statistic"] = r.statistic;
    d["p_value"] = r.p_value;
    d["df"] = r.df;
    return d;
}

}  // namespace

PYBIND11_MODULE(_camo, m) {
    m.doc() = "Multi-view camouflage toolkit: scenes, geometry, baselines and evaluation";

    static py::exception<Error> base_error(m, "CamoError");
    static py::exception<ConfigError> config_error(m, "ConfigError", base_error.ptr());
    static py::exception<DomainError> domain_error(m, "DomainError", base_error.ptr());
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const ConfigError& e) {
            py::set_error(config_error, e.what());
        } catch (const DomainError& e) {
            py::set_error(domain_error, e.what());
        } catch (const Error& e) {
            py::set_error(base_error, (e.kind() + ": " + e.what()).c_str());
        }
    });

    py::class_<CameraView>(m, "CameraView")
        .def_readonly("id", &CameraView::id)
        .def_readonly("K", &CameraView::K)
        .def_readonly("R", &CameraView::R)
        .def_readonly("t", &CameraView::t)
        .def_property_readonly("role", [](const CameraView& v) { return std::string(to_string(v.role)); })
        .def_property_readonly("image", [](const CameraView& v) { return image_array(v.image); })
        .def_property_readonly("center", &CameraView::center)
        .def("project",
             [](const CameraView& v, const Vec3& x) {
                 const Projection p = project(x, v);
                 return py::make_tuple(p.pixel, p.depth);
             },
             py::arg("point"))
        .def("unproject", [](const CameraView& v, const Vec2& u, double depth) { return unproject(u, depth, v); },
             py::arg("pixel"), py::arg("depth"));

    py::class_<Scene>(m, "Scene")
        .def_readonly("name", &Scene::name)
        .def_readonly("views", &Scene::views)
        .def_readonly("ground_plane", &Scene::ground_plane)
        .def_readonly("anchor", &Scene::anchor)
        .def_readonly("reference_length", &Scene::reference_length)
        .def("view_indices",
             [](const Scene& s, const std::string& role) { return s.view_indices(parse_view_role(role)); },
             py::arg("role"));

    m.def("fixture_scene",
          [](int height, int width, int n_views, uint64_t seed) {
              FixtureOptions o;
              o.height = height;
              o.width = width;
              o.n_views = n_views;
              o.seed = seed;
              return make_fixture_scene(o);
          },
          py::arg("height") = kWorkingHeight, py::arg("width") = kWorkingWidth, py::arg("n_views") = 8,
          py::arg("seed") = 7, "Procedural ground-plane scene photographed by a ring of cameras.");
    m.def("load_scene",
          [](const std::filesystem::path& manifest, int height, int width) {
              return load_scene(manifest, {.height = height, .width = width});
          },
          py::arg("manifest"), py::arg("height") = kWorkingHeight, py::arg("width") = kWorkingWidth);
    m.def("save_scene", &save_scene, py::arg("scene"), py::arg("directory"));
    m.def("split_views", &split_views, py::arg("scene"), py::arg("seed"));
    m.def("test_view_count", &test_view_count, py::arg("n_views"));

    m.def("positional_encoding", &positional_encoding, py::arg("x"), py::arg("n_freq") = kDefaultFrequencies);
    m.def("eval_crop_size", &eval_crop_size, py::arg("d"));
    m.def("extract_eval_crop",
          [](const py::array_t<float>& rendered, const py::array_t<float>& background, const py::array_t<bool>& mask) {
              const EvalCrop c = extract_eval_crop(array_image(rendered), array_image(background), array_mask(mask));
              return py::make_tuple(image_array(c.rendered), image_array(c.background), c.size);
          },
          py::arg("rendered"), py::arg("background"), py::arg("mask"));

    m.def("render_baseline",
          [](const std::string& method, const Scene& scene, int view, uint64_t seed, int atlas_resolution,
             const std::optional<std::filesystem::path>& mesh_path) {
              const Mesh mesh = mesh_or_cuboid(mesh_path);
              const Placement pl = anchor_placement(scene);
              BaselineOptions o;
              o.domain.atlas_resolution = atlas_resolution;
              const SurfaceTextureMap tex = run_baseline(parse_baseline_method(method), scene, mesh, pl, seed, o);
              const Composite c = render_texture(scene.views.at(view), mesh, object_to_world(scene, pl), tex);
              return py::make_tuple(image_array(c.image), mask_array(c.mask));
          },
          py::arg("method"), py::arg("scene"), py::arg("view"), py::arg("seed") = 0, py::arg("atlas_resolution") = 256,
          py::arg("mesh") = std::nullopt, "Texture the object with a classical baseline and composite it into a view.");

    m.def("welch_t_test", [](const std::vector<double>& a, const std::vector<double>& b) { return test_dict(welch_t_test(a, b)); },
          py::arg("a"), py::arg("b"));
    m.def("mann_whitney_u",
          [](const std::vector<double>& a, const std::vector<double>& b) { return test_dict(mann_whitney_u(a, b)); },
          py::arg("a"), py::arg("b"));
    m.def("aggregate_study_log",
          [](const std::filesystem::path& log) {
              const StudyTable t = aggregate_study(read_response_log(log));
              py::list rows;
              for (const auto& r : t.rows) {
                  py::dict d;
                  d["method"] = r.method;
                  d["n"] = r.n;
                  d["confusion"] = r.confusion;
                  d["confusion_ci"] = py::make_tuple(r.confusion_ci.lo, r.confusion_ci.hi);
                  d["mean_time"] = r.mean_time;
                  d["median_time"] = r.median_time;
                  rows.append(d);
              }
              return rows;
          },
          py::arg("log"), "Per-method confusion rate and timing of a study response log.");
}
