#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "camo/image.hpp"
#include "camo/study.hpp"

namespace testing_support {

/// Writes a study asset directory with `n_scenes` scenes, one image per
/// method, and a rectangular object mask at rows 10..19, cols 20..29.
inline camo::StudyManifest write_study_assets(const std::filesystem::path& dir, int n_scenes,
                                              const std::vector<std::string>& methods) {
    camo::StudyManifest m;
    m.methods = methods;
    camo::Mask mask(32, 48);
    for (int y = 10; y < 20; ++y)
        for (int x = 20; x < 30; ++x) mask.set(y, x, true);
    for (int s = 0; s < n_scenes; ++s) {
        const std::string sid = "scene" + std::to_string(s);
        m.scenes.push_back(sid);
        for (size_t k = 0; k < methods.size(); ++k) {
            camo::Image img(32, 48, 0.1f + 0.02f * static_cast<float>(s % 10) + 0.1f * static_cast<float>(k));
            const std::string stem = sid + "/" + methods[k];
            camo::save_image(dir / (stem + ".png"), img);
            camo::save_mask(dir / (stem + "_mask.png"), mask);
            m.assets.push_back({sid, "test0", methods[k], stem + ".png", stem + "_mask.png"});
        }
    }
    m.save(dir);
    return m;
}

}  // namespace testing_support
