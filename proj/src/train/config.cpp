#include "retarget/train/config.hpp"

#include <fstream>
#include <sstream>

#include "retarget/core/error.hpp"

namespace retarget::train {

void TrainConfig::validate() const {
    if (lr_generator <= 0.0 || lr_discriminator <= 0.0)
        throw ModuleError("trainer", "learning rates must be positive");
    if (batch_size < 1) throw ModuleError("trainer", "batch_size must be >= 1");
    if (epochs < 1) throw ModuleError("trainer", "epochs must be >= 1");
    if (canvas < gen.stride_factor() || canvas % gen.stride_factor() != 0)
        throw ModuleError("trainer", "canvas must be a positive multiple of " +
                                         std::to_string(gen.stride_factor()));
    if (checkpoint_every < 1) throw ModuleError("trainer", "checkpoint_every must be >= 1");
    weights.validate();
}

namespace {

template <typename T>
T parse_num(const std::string& key, const std::string& value) {
    std::istringstream ss(value);
    T out;
    ss >> out;
    if (ss.fail()) throw ModuleError("trainer", "bad value for config key '" + key + "': " + value);
    return out;
}

bool parse_bool(const std::string& key, const std::string& value) {
    if (value == "true" || value == "1" || value == "yes") return true;
    if (value == "false" || value == "0" || value == "no") return false;
    throw ModuleError("trainer", "bad boolean for config key '" + key + "': " + value);
}

}  // namespace

void apply_config_key(TrainConfig& cfg, const std::string& key, const std::string& value) {
    if (key == "lr_generator") cfg.lr_generator = parse_num<double>(key, value);
    else if (key == "lr_discriminator") cfg.lr_discriminator = parse_num<double>(key, value);
    else if (key == "batch_size") cfg.batch_size = parse_num<int>(key, value);
    else if (key == "epochs") cfg.epochs = parse_num<int>(key, value);
    else if (key == "canvas") cfg.canvas = parse_num<int>(key, value);
    else if (key == "seed") cfg.seed = parse_num<uint64_t>(key, value);
    else if (key == "kappa") cfg.weights.kappa = parse_num<double>(key, value);
    else if (key == "alpha") cfg.weights.alpha = parse_num<double>(key, value);
    else if (key == "beta") cfg.weights.beta = parse_num<double>(key, value);
    else if (key == "gamma") cfg.weights.gamma = parse_num<double>(key, value);
    else if (key == "checkpoint_every") cfg.checkpoint_every = parse_num<int64_t>(key, value);
    else if (key == "max_steps") cfg.max_steps = parse_num<int64_t>(key, value);
    else if (key == "gen_base_width") cfg.gen.base_width = parse_num<int>(key, value);
    else if (key == "gen_max_width") cfg.gen.max_width = parse_num<int>(key, value);
    else if (key == "gen_n_residual") cfg.gen.n_residual = parse_num<int>(key, value);
    else if (key == "gen_ffc_global_ratio") cfg.gen.ffc_global_ratio = parse_num<float>(key, value);
    else if (key == "disc_base_width") cfg.disc.base_width = parse_num<int>(key, value);
    else if (key == "disc_n_layers") cfg.disc.n_layers = parse_num<int>(key, value);
    else if (key == "perceptual_width") cfg.perceptual_width = parse_num<int>(key, value);
    else if (key == "shift_jitter") cfg.shift_jitter = parse_bool(key, value);
    else if (key == "data_root") cfg.data_root = value;
    else if (key == "annotation_provider") cfg.annotation_provider = value;
    else if (key == "checkpoint_dir") cfg.checkpoint_dir = value;
    else if (key == "log_path") cfg.log_path = value;
    else if (key == "resume") cfg.resume = value;
    else throw ModuleError("trainer", "unknown config key '" + key + "'");
}

TrainConfig load_train_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ModuleError("trainer", "cannot read config file " + path);
    TrainConfig cfg;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        const auto eq = line.find('=');
        auto trim = [](std::string s) {
            const auto b = s.find_first_not_of(" \t\r");
            const auto e = s.find_last_not_of(" \t\r");
            return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
        };
        if (eq == std::string::npos) {
            if (!trim(line).empty())
                throw ModuleError("trainer", path + ":" + std::to_string(lineno) +
                                                 ": expected key = value");
            continue;
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty())
            throw ModuleError("trainer", path + ":" + std::to_string(lineno) + ": empty key");
        apply_config_key(cfg, key, value);
    }
    return cfg;
}

}  // namespace retarget::train
