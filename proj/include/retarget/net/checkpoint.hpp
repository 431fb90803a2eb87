#pragma once

#include <map>
#include <string>
#include <vector>

#include "retarget/net/discriminator.hpp"
#include "retarget/net/generator.hpp"

namespace retarget::net {

inline constexpr const char* kCheckpointVersion = "retarget-ckpt-v1";

struct CheckpointMeta {
    std::string version = kCheckpointVersion;
    GeneratorConfig gen_config;
    DiscriminatorConfig disc_config;
    bool has_discriminator = false;
    int epoch = 0;
    int64_t step = 0;
    uint64_t seed = 0;
    int64_t generator_param_count = 0;
};

// A named tensor slot inside a checkpoint; section qualifies the namespace
// ("generator", "discriminator", "optimizer", "buffer").
struct TensorEntry {
    std::string section;
    std::string name;
    const Tensor* tensor;
};

struct LoadedCheckpoint {
    CheckpointMeta meta;
    std::map<std::string, Tensor> tensors;  // key = section + "/" + name

    const Tensor& require(const std::string& section, const std::string& name) const;
    bool has(const std::string& section, const std::string& name) const;
};

// Atomic write (temp file + rename). Blobs are raw little-endian float32.
void save_checkpoint(const std::string& path, const CheckpointMeta& meta,
                     const std::vector<TensorEntry>& entries);

// Fails loudly on magic, version, or truncation problems.
LoadedCheckpoint load_checkpoint(const std::string& path);

// Restores generator weights + buffers from a checkpoint, verifying every
// name and shape. Returns the constructed generator.
Generator restore_generator(const LoadedCheckpoint& ckpt);
Discriminator restore_discriminator(const LoadedCheckpoint& ckpt);

}  // namespace retarget::net
