#pragma once

#include <cstdint>
#include <string>

#include "retarget/loss/losses.hpp"
#include "retarget/net/discriminator.hpp"
#include "retarget/net/generator.hpp"

namespace retarget::train {

struct TrainConfig {
    double lr_generator = 0.001;
    double lr_discriminator = 0.0001;
    int batch_size = 6;
    int epochs = 40;
    int canvas = 512;
    uint64_t seed = 0;
    loss::LossWeights weights;
    int64_t checkpoint_every = 1000;
    int64_t max_steps = 0;  // 0 = run all epochs; useful for smoke runs

    net::GeneratorConfig gen;
    net::DiscriminatorConfig disc;
    int perceptual_width = 16;
    bool shift_jitter = true;

    std::string data_root;
    std::string annotation_provider = "files";
    std::string checkpoint_dir = "checkpoints";
    std::string log_path;  // empty = stdout
    std::string resume;    // checkpoint to continue from

    void validate() const;  // throws ModuleError("trainer")
};

// Flat `key = value` file; '#' starts a comment. Unknown keys are fatal so
// typos never silently fall back to defaults.
TrainConfig load_train_config(const std::string& path);

// Applies a single key=value override (the CLI layer routes flags here so the
// file and the flags share one schema).
void apply_config_key(TrainConfig& cfg, const std::string& key, const std::string& value);

}  // namespace retarget::train
