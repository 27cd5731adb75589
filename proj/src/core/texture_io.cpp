#include "camo/texture_io.hpp"

#include <fstream>

#include "camo/errors.hpp"

namespace camo {

using json = nlohmann::json;

namespace {

json read_info(const std::filesystem::path& directory) {
    std::ifstream in(directory / "texture.json");
    if (!in) throw IngestError("missing texture description: " + (directory / "texture.json").string());
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw IngestError("malformed texture description: " + std::string(e.what()));
    }
}

}  // namespace

void save_texture(const std::filesystem::path& directory, const SurfaceTextureMap& texture, const json& meta) {
    std::filesystem::create_directories(directory);
    const SurfaceSites& s = texture.sites;
    json info = {{"meta", meta}};
    if (s.layout == TextureLayout::cuboid_atlas) {
        info["layout"] = "cuboid_atlas";
        info["resolution"] = s.resolution;
        info["box"] = {{"min", {s.box.min.x(), s.box.min.y(), s.box.min.z()}},
                       {"max", {s.box.max.x(), s.box.max.y(), s.box.max.z()}}};
        for (int k = 0; k < 6; ++k) {
            Image face(s.resolution, s.resolution);
            for (int j = 0; j < s.resolution; ++j)
                for (int i = 0; i < s.resolution; ++i) face.set_pixel(j, i, texture.colors[atlas_site(s.resolution, k, i, j)]);
            save_image(directory / ("face_" + std::to_string(k) + ".png"), face);
        }
    } else {
        info["layout"] = "view_table";
        info["view_index"] = s.view_index;
        Image table(s.table_height, s.table_width);
        Mask mask(s.table_height, s.table_width);
        for (size_t i = 0; i < s.size(); ++i) {
            table.set_pixel(s.pixels[i].y, s.pixels[i].x, texture.colors[i]);
            mask.set(s.pixels[i].y, s.pixels[i].x, true);
        }
        save_image(directory / "view_table.png", table);
        save_mask(directory / "view_table_mask.png", mask);
    }
    std::ofstream(directory / "texture.json") << info.dump(2) << '\n';
}

SurfaceTextureMap load_texture(const std::filesystem::path& directory, const Scene& scene, const Mesh& mesh,
                               const Placement& placement) {
    const json info = read_info(directory);
    SurfaceTextureMap tex;
    const std::string layout = info.value("layout", "");
    if (layout == "cuboid_atlas") {
        const int res = info.at("resolution").get<int>();
        const auto& b = info.at("box");
        const BoxShape box{Vec3(b["min"][0], b["min"][1], b["min"][2]), Vec3(b["max"][0], b["max"][1], b["max"][2])};
        tex.sites = cuboid_atlas_sites(box, res);
        tex.colors.assign(tex.sites.size(), Rgb::Zero());
        for (int k = 0; k < 6; ++k) {
            const Image face = load_image(directory / ("face_" + std::to_string(k) + ".png"));
            if (face.height != res || face.width != res) throw IngestError("texture face size does not match its resolution");
            for (int j = 0; j < res; ++j)
                for (int i = 0; i < res; ++i) tex.colors[atlas_site(res, k, i, j)] = face.pixel(j, i);
        }
    } else if (layout == "view_table") {
        const int view = info.at("view_index").get<int>();
        if (view < 0 || view >= static_cast<int>(scene.views.size())) throw IngestError("texture view index out of range");
        tex.sites = view_table_sites(scene, mesh, placement, view);
        const Image table = load_image(directory / "view_table.png");
        if (table.height != tex.sites.table_height || table.width != tex.sites.table_width)
            throw IngestError("view table size does not match the scene view");
        for (const auto& p : tex.sites.pixels) tex.colors.push_back(table.pixel(p.y, p.x));
    } else {
        throw IngestError("unknown texture layout '" + layout + "'");
    }
    tex.filled.assign(tex.sites.size(), 1);
    return tex;
}

json texture_meta(const std::filesystem::path& directory) { return read_info(directory).value("meta", json::object()); }

}  // namespace camo
