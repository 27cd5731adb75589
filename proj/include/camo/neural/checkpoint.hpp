#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>

#include <torch/torch.h>

#include "json.hpp"

#include "camo/neural/texture_net.hpp"

namespace camo {

inline constexpr uint32_t kCheckpointVersion = 1;

/// Contents of a checkpoint file: a JSON header, named float/int tensors and
/// opaque byte blobs.
///
/// Layout (little endian): "CAMOCKPT", u32 version, u64 header length and the
/// header JSON, u32 tensor count then per tensor (u32 name length, name, u8
/// dtype, u32 rank, i64 dims, raw data), u32 blob count then per blob (u32
/// name length, name, u64 size, bytes).
struct CheckpointData {
    nlohmann::json header;
    std::map<std::string, torch::Tensor> tensors;
    std::map<std::string, std::string> blobs;
};

/// Writes to a temporary file next to `path` and renames it into place.
void write_checkpoint(const std::filesystem::path& path, const CheckpointData& data);

/// Throws IngestError for a missing file, a bad magic or an unknown version.
CheckpointData read_checkpoint(const std::filesystem::path& path);

/// Named parameters and buffers of a module, detached copies.
std::map<std::string, torch::Tensor> module_state(const torch::nn::Module& module, const std::string& prefix = "");

/// Copies tensors named `prefix + name` into the module. Throws IngestError
/// for missing or mis-shaped entries.
void load_module_state(torch::nn::Module& module, const std::map<std::string, torch::Tensor>& tensors,
                       const std::string& prefix = "");

nlohmann::json to_json(const NeuralTextureConfig& config);
NeuralTextureConfig neural_texture_config_from_json(const nlohmann::json& j);

void save_neural_texture(const std::filesystem::path& path, NeuralTexture& net,
                         const nlohmann::json& extra = nlohmann::json::object());
NeuralTexture load_neural_texture(const std::filesystem::path& path);

}  // namespace camo
