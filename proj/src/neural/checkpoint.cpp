#include "camo/neural/checkpoint.hpp"

#include <cstring>
#include <fstream>

#include "camo/errors.hpp"

namespace camo {

using nlohmann::json;

namespace {

constexpr char kMagic[8] = {'C', 'A', 'M', 'O', 'C', 'K', 'P', 'T'};

enum class DType : uint8_t { f32 = 0, f64 = 1, i64 = 2 };

template <typename T>
void put(std::ostream& out, T v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T get(std::istream& in) {
    T v{};
    in.read(reinterpret_cast<char*>(&v), sizeof(T));
    if (!in) throw IngestError("truncated checkpoint");
    return v;
}

void put_string(std::ostream& out, const std::string& s) {
    put<uint32_t>(out, static_cast<uint32_t>(s.size()));
    out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

std::string get_bytes(std::istream& in, uint64_t n) {
    std::string s(n, '\0');
    in.read(s.data(), static_cast<std::streamsize>(n));
    if (!in) throw IngestError("truncated checkpoint");
    return s;
}

DType dtype_of(const torch::Tensor& t) {
    switch (t.scalar_type()) {
        case torch::kFloat32: return DType::f32;
        case torch::kFloat64: return DType::f64;
        case torch::kInt64: return DType::i64;
        default: throw ContractError("checkpoint tensors must be float32, float64 or int64");
    }
}

torch::ScalarType scalar_of(DType d) {
    switch (d) {
        case DType::f32: return torch::kFloat32;
        case DType::f64: return torch::kFloat64;
        case DType::i64: return torch::kInt64;
    }
    throw IngestError("unknown tensor type in checkpoint");
}

}  // namespace

void write_checkpoint(const std::filesystem::path& path, const CheckpointData& data) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    const auto tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error("io", "cannot write " + tmp);
        out.write(kMagic, sizeof kMagic);
        put<uint32_t>(out, kCheckpointVersion);
        const std::string header = data.header.dump();
        put<uint64_t>(out, header.size());
        out.write(header.data(), static_cast<std::streamsize>(header.size()));
        put<uint32_t>(out, static_cast<uint32_t>(data.tensors.size()));
        for (const auto& [name, value] : data.tensors) {
            const auto t = value.detach().contiguous().cpu();
            put_string(out, name);
            put<uint8_t>(out, static_cast<uint8_t>(dtype_of(t)));
            put<uint32_t>(out, static_cast<uint32_t>(t.dim()));
            for (int64_t d : t.sizes()) put<int64_t>(out, d);
            out.write(static_cast<const char*>(t.data_ptr()), static_cast<std::streamsize>(t.nbytes()));
        }
        put<uint32_t>(out, static_cast<uint32_t>(data.blobs.size()));
        for (const auto& [name, bytes] : data.blobs) {
            put_string(out, name);
            put<uint64_t>(out, bytes.size());
            out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
        }
        if (!out) throw Error("io", "failed writing " + tmp);
    }
    std::filesystem::rename(tmp, path);
}

CheckpointData read_checkpoint(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IngestError("missing checkpoint: " + path.string());
    char magic[8];
    in.read(magic, sizeof magic);
    if (!in || std::memcmp(magic, kMagic, sizeof magic) != 0) throw IngestError("not a checkpoint: " + path.string());
    const auto version = get<uint32_t>(in);
    if (version != kCheckpointVersion)
        throw IngestError("unsupported checkpoint version " + std::to_string(version));
    CheckpointData d;
    d.header = json::parse(get_bytes(in, get<uint64_t>(in)));
    const auto n_tensors = get<uint32_t>(in);
    for (uint32_t k = 0; k < n_tensors; ++k) {
        const std::string name = get_bytes(in, get<uint32_t>(in));
        const auto type = scalar_of(static_cast<DType>(get<uint8_t>(in)));
        const auto rank = get<uint32_t>(in);
        std::vector<int64_t> dims(rank);
        for (auto& x : dims) x = get<int64_t>(in);
        auto t = torch::empty(dims, type);
        in.read(static_cast<char*>(t.data_ptr()), static_cast<std::streamsize>(t.nbytes()));
        if (!in) throw IngestError("truncated checkpoint");
        d.tensors.emplace(name, t);
    }
    const auto n_blobs = get<uint32_t>(in);
    for (uint32_t k = 0; k < n_blobs; ++k) {
        const std::string name = get_bytes(in, get<uint32_t>(in));
        d.blobs.emplace(name, get_bytes(in, get<uint64_t>(in)));
    }
    return d;
}

std::map<std::string, torch::Tensor> module_state(const torch::nn::Module& module, const std::string& prefix) {
    std::map<std::string, torch::Tensor> out;
    for (const auto& p : module.named_parameters(true)) out[prefix + p.key()] = p.value().detach().clone();
    for (const auto& b : module.named_buffers(true)) out[prefix + b.key()] = b.value().detach().clone();
    return out;
}

void load_module_state(torch::nn::Module& module, const std::map<std::string, torch::Tensor>& tensors,
                       const std::string& prefix) {
    torch::NoGradGuard guard;
    const auto copy = [&](const std::string& key, torch::Tensor& dst) {
        const auto it = tensors.find(prefix + key);
        if (it == tensors.end()) throw IngestError("checkpoint lacks tensor '" + prefix + key + "'");
        if (it->second.sizes() != dst.sizes()) throw IngestError("checkpoint tensor '" + prefix + key + "' has the wrong shape");
        dst.copy_(it->second);
    };
    for (auto& p : module.named_parameters(true)) copy(p.key(), p.value());
    for (auto& b : module.named_buffers(true)) copy(b.key(), b.value());
}

json to_json(const NeuralTextureConfig& c) {
    return {{"height", c.height},
            {"width", c.width},
            {"encoder", {{"width", c.encoder.width}, {"channels", c.encoder.channels}}},
            {"mlp", {{"n_freq", c.mlp.n_freq}, {"width", c.mlp.width}, {"blocks", c.mlp.blocks}}}};
}

NeuralTextureConfig neural_texture_config_from_json(const json& j) {
    NeuralTextureConfig c;
    c.height = j.at("height");
    c.width = j.at("width");
    c.encoder.width = j.at("encoder").at("width");
    c.encoder.channels = j.at("encoder").at("channels").get<std::array<int, 3>>();
    c.mlp.n_freq = j.at("mlp").at("n_freq");
    c.mlp.width = j.at("mlp").at("width");
    c.mlp.blocks = j.at("mlp").at("blocks");
    return c;
}

void save_neural_texture(const std::filesystem::path& path, NeuralTexture& net, const json& extra) {
    CheckpointData d;
    d.header = {{"kind", "neural_texture"}, {"config", to_json(net->config())}, {"extra", extra}};
    d.tensors = module_state(*net);
    write_checkpoint(path, d);
}

NeuralTexture load_neural_texture(const std::filesystem::path& path) {
    const CheckpointData d = read_checkpoint(path);
    const std::string kind = d.header.value("kind", "");
    if (kind != "neural_texture" && kind != "training_state")
        throw IngestError("checkpoint does not hold a neural texture: " + path.string());
    NeuralTexture net(neural_texture_config_from_json(d.header.at("config")));
    load_module_state(*net, d.tensors, kind == "training_state" ? "G." : "");
    net->eval();
    return net;
}

}  // namespace camo
