#pragma once

#include <filesystem>

#include "json.hpp"
#include "camo/surface_texture.hpp"

namespace camo {

/// Writes a texture directory: `texture.json` plus `face_<k>.png` (k = 0..5,
/// rows along the face's v axis) for cuboid atlases, or `view_table.png` and
/// `view_table_mask.png` for per-view color tables. `meta` is stored verbatim
/// under "meta".
void save_texture(const std::filesystem::path& directory, const SurfaceTextureMap& texture,
                  const nlohmann::json& meta = nlohmann::json::object());

/// Reads a texture directory back; view tables are re-sited on `mesh` placed
/// at `placement` in `scene`. Colors come back quantized to 8 bits.
SurfaceTextureMap load_texture(const std::filesystem::path& directory, const Scene& scene, const Mesh& mesh,
                               const Placement& placement);

/// The "meta" block of a texture directory.
nlohmann::json texture_meta(const std::filesystem::path& directory);

}  // namespace camo
