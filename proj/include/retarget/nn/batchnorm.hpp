#pragma once

#include "retarget/nn/layer.hpp"

namespace retarget::nn {

// Per-channel normalization over batch and spatial dims, affine, with running
// statistics for eval mode.
class BatchNorm2d : public Layer {
public:
    BatchNorm2d(std::string name, int channels, float eps = 1e-5f, float momentum = 0.1f);

    Tensor forward(const Tensor& x, bool train) override;
    Tensor backward(const Tensor& grad_out, bool accumulate_param_grads) override;

    void collect_params(std::vector<Param*>& out) override;
    void collect_buffers(std::vector<BufferRef>& out) override;

    Param& gamma() { return gamma_; }
    Param& beta() { return beta_; }

private:
    int channels_;
    float eps_, momentum_;
    Param gamma_, beta_;
    Tensor running_mean_, running_var_;
    std::string name_;
    // backward caches
    Tensor xhat_;
    std::vector<float> inv_std_;
    bool trained_forward_ = false;
    bool unbatched_ = false;
};

}  // namespace retarget::nn
