#include "retarget/net/checkpoint.hpp"

#include <json.hpp>

#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>

#include "retarget/core/error.hpp"

namespace retarget::net {

namespace {

using nlohmann::json;

constexpr char kMagic[8] = {'R', 'T', 'G', 'T', 'C', 'K', 'P', 'T'};

json gen_config_to_json(const GeneratorConfig& c) {
    return json{{"in_channels", c.in_channels},   {"out_channels", c.out_channels},
                {"base_width", c.base_width},     {"max_width", c.max_width},
                {"n_down", c.n_down},             {"n_residual", c.n_residual},
                {"n_up", c.n_up},                 {"ffc_global_ratio", c.ffc_global_ratio},
                {"ffc_kernel", c.ffc_kernel}};
}

GeneratorConfig gen_config_from_json(const json& j) {
    GeneratorConfig c;
    c.in_channels = j.at("in_channels");
    c.out_channels = j.at("out_channels");
    c.base_width = j.at("base_width");
    c.max_width = j.at("max_width");
    c.n_down = j.at("n_down");
    c.n_residual = j.at("n_residual");
    c.n_up = j.at("n_up");
    c.ffc_global_ratio = j.at("ffc_global_ratio");
    c.ffc_kernel = j.at("ffc_kernel");
    return c;
}

json disc_config_to_json(const DiscriminatorConfig& c) {
    return json{{"n_layers", c.n_layers},
                {"base_width", c.base_width},
                {"in_channels", c.in_channels},
                {"leaky_slope", c.leaky_slope},
                {"width_cap", c.width_cap}};
}

DiscriminatorConfig disc_config_from_json(const json& j) {
    DiscriminatorConfig c;
    c.n_layers = j.at("n_layers");
    c.base_width = j.at("base_width");
    c.in_channels = j.at("in_channels");
    c.leaky_slope = j.at("leaky_slope");
    c.width_cap = j.at("width_cap");
    return c;
}

}  // namespace

const Tensor& LoadedCheckpoint::require(const std::string& section,
                                        const std::string& name) const {
    auto it = tensors.find(section + "/" + name);
    if (it == tensors.end())
        throw ModuleError("trainer", "checkpoint missing tensor " + section + "/" + name);
    return it->second;
}

bool LoadedCheckpoint::has(const std::string& section, const std::string& name) const {
    return tensors.count(section + "/" + name) > 0;
}

void save_checkpoint(const std::string& path, const CheckpointMeta& meta,
                     const std::vector<TensorEntry>& entries) {
    json header;
    header["format_version"] = meta.version;
    header["generator_config"] = gen_config_to_json(meta.gen_config);
    header["has_discriminator"] = meta.has_discriminator;
    if (meta.has_discriminator)
        header["discriminator_config"] = disc_config_to_json(meta.disc_config);
    header["trainer"] = {{"epoch", meta.epoch}, {"step", meta.step}, {"seed", meta.seed}};
    header["generator_param_count"] = meta.generator_param_count;

    int64_t offset = 0;
    json index = json::array();
    for (const auto& e : entries) {
        index.push_back({{"section", e.section},
                         {"name", e.name},
                         {"shape", e.tensor->shape()},
                         {"offset", offset}});
        offset += e.tensor->numel();
    }
    header["tensors"] = index;

    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw ModuleError("trainer", "cannot write checkpoint " + path);
        const std::string hs = header.dump();
        const uint32_t hlen = static_cast<uint32_t>(hs.size());
        out.write(kMagic, sizeof(kMagic));
        out.write(reinterpret_cast<const char*>(&hlen), sizeof(hlen));
        out.write(hs.data(), static_cast<std::streamsize>(hs.size()));
        for (const auto& e : entries)
            out.write(reinterpret_cast<const char*>(e.tensor->data()),
                      static_cast<std::streamsize>(e.tensor->numel() * sizeof(float)));
        if (!out) throw ModuleError("trainer", "checkpoint write failed for " + path);
    }
    std::filesystem::rename(tmp, path);
}

LoadedCheckpoint load_checkpoint(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ModuleError("trainer", "cannot open checkpoint " + path);
    char magic[8];
    in.read(magic, sizeof(magic));
    if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
        throw ModuleError("trainer", "not a checkpoint file (bad magic): " + path);
    uint32_t hlen = 0;
    in.read(reinterpret_cast<char*>(&hlen), sizeof(hlen));
    std::string hs(hlen, '\0');
    in.read(hs.data(), hlen);
    if (!in) throw ModuleError("trainer", "truncated checkpoint header: " + path);

    json header;
    try {
        header = json::parse(hs);
    } catch (const std::exception& e) {
        throw ModuleError("trainer", std::string("corrupt checkpoint header: ") + e.what());
    }
    const std::string version = header.at("format_version");
    if (version != kCheckpointVersion)
        throw ModuleError("trainer", "checkpoint format version mismatch: file has '" + version +
                                         "', this build reads '" + kCheckpointVersion + "'");

    LoadedCheckpoint ckpt;
    ckpt.meta.version = version;
    ckpt.meta.gen_config = gen_config_from_json(header.at("generator_config"));
    ckpt.meta.has_discriminator = header.value("has_discriminator", false);
    if (ckpt.meta.has_discriminator)
        ckpt.meta.disc_config = disc_config_from_json(header.at("discriminator_config"));
    ckpt.meta.epoch = header.at("trainer").at("epoch");
    ckpt.meta.step = header.at("trainer").at("step");
    ckpt.meta.seed = header.at("trainer").at("seed");
    ckpt.meta.generator_param_count = header.value("generator_param_count", int64_t{0});

    for (const auto& e : header.at("tensors")) {
        std::vector<int> shape = e.at("shape").get<std::vector<int>>();
        Tensor t(shape);
        in.read(reinterpret_cast<char*>(t.data()),
                static_cast<std::streamsize>(t.numel() * sizeof(float)));
        if (!in) throw ModuleError("trainer", "truncated checkpoint blobs: " + path);
        ckpt.tensors.emplace(std::string(e.at("section")) + "/" + std::string(e.at("name")),
                             std::move(t));
    }
    return ckpt;
}

namespace {
void restore_named(const LoadedCheckpoint& ckpt, const std::string& section,
                   std::vector<retarget::nn::Param*> params,
                   std::vector<retarget::nn::BufferRef> buffers) {
    for (auto* p : params) {
        const Tensor& t = ckpt.require(section, p->name);
        if (t.shape() != p->value.shape())
            throw ModuleError("trainer", "checkpoint shape mismatch for " + p->name + ": file " +
                                             t.shape_str() + " vs model " + p->value.shape_str());
        p->value = t;
    }
    for (auto& [name, buf] : buffers) {
        const Tensor& t = ckpt.require("buffer", name);
        if (t.shape() != buf->shape())
            throw ModuleError("trainer", "checkpoint shape mismatch for buffer " + name);
        *buf = t;
    }
}
}  // namespace

Generator restore_generator(const LoadedCheckpoint& ckpt) {
    Generator gen(ckpt.meta.gen_config);
    restore_named(ckpt, "generator", gen.params(), gen.buffers());
    return gen;
}

Discriminator restore_discriminator(const LoadedCheckpoint& ckpt) {
    if (!ckpt.meta.has_discriminator)
        throw ModuleError("trainer", "checkpoint is generator-only (inference only)");
    Discriminator disc(ckpt.meta.disc_config);
    restore_named(ckpt, "discriminator", disc.params(), {});
    return disc;
}

}  // namespace retarget::net
