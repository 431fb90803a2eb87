#pragma once

#include <memory>
#include <vector>

#include "retarget/ffc/ffc_block.hpp"
#include "retarget/nn/upsample.hpp"

namespace retarget::net {

using retarget::Tensor;

struct GeneratorConfig {
    int in_channels = 6;
    int out_channels = 3;
    int base_width = 64;
    int max_width = 256;  // width cap reached before the residual trunk
    int n_down = 3;
    int n_residual = 9;
    int n_up = 3;
    float ffc_global_ratio = 0.75f;
    int ffc_kernel = 3;

    int stride_factor() const { return 1 << n_down; }
    int width_at(int level) const;  // channel width after `level` downsamplings
};

// Retargeting generator: 7x7 stem, n_down stride-2 blocks, n_residual FFC
// residual blocks, n_up nearest-upsample blocks, 7x7 head with sigmoid.
// Fully convolutional; spatial dims must be divisible by 2^n_down.
class Generator {
public:
    explicit Generator(const GeneratorConfig& cfg);

    void init(uint64_t seed);

    Tensor forward(const Tensor& x, bool train);
    // Gradient w.r.t. the 6-channel input; accumulates parameter gradients
    // unless told otherwise.
    Tensor backward(const Tensor& grad_out, bool accumulate_param_grads = true);

    const GeneratorConfig& config() const { return cfg_; }
    std::vector<retarget::nn::Param*> params();
    std::vector<retarget::nn::BufferRef> buffers();
    int64_t param_count();

private:
    struct ConvBlock {
        std::unique_ptr<retarget::nn::Conv2d> conv;
        std::unique_ptr<retarget::nn::BatchNorm2d> bn;
        retarget::nn::ReLU relu;
    };
    struct ResBlock {
        std::unique_ptr<retarget::ffc::FFCBlock> ffc;
        Tensor skip_input;  // cached for the residual add
    };

    GeneratorConfig cfg_;
    ConvBlock stem_;
    std::vector<ConvBlock> down_;
    std::vector<ResBlock> residual_;
    std::vector<std::unique_ptr<retarget::nn::UpsampleNearest2x>> up_samplers_;
    std::vector<ConvBlock> up_;
    std::unique_ptr<retarget::nn::Conv2d> head_;
    retarget::nn::Sigmoid out_act_;
    bool unbatched_ = false;
};

}  // namespace retarget::net
