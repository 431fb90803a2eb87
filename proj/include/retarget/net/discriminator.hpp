#pragma once

#include <memory>
#include <vector>

#include "retarget/nn/activations.hpp"
#include "retarget/nn/conv2d.hpp"

namespace retarget::net {

using retarget::Tensor;

struct DiscriminatorConfig {
    int n_layers = 4;
    int base_width = 64;
    int in_channels = 3;
    float leaky_slope = 0.2f;
    int width_cap = 512;
};

// Patch discriminator: n_layers 4x4 convs with LeakyReLU (first n_layers-1
// strided), then a 1-channel logits conv. Logits are raw scores per
// overlapping patch; all sigmoid/log handling lives in the loss code. No
// normalization layers, so the R1 input-gradient path stays piecewise linear
// and its parameter gradient can be computed exactly by a second adjoint pass.
class Discriminator {
public:
    explicit Discriminator(const DiscriminatorConfig& cfg);

    void init(uint64_t seed);

    struct Output {
        Tensor logits;                 // [N, 1, h', w']
        std::vector<Tensor> features;  // n_layers activation maps + logits, shallow to deep
    };

    Tensor forward_logits(const Tensor& img, bool train);  // logits only
    Output forward(const Tensor& img, bool train);

    // Backward from gradients injected at any subset of the feature list
    // (empty tensors are skipped). feature_grads.back() is the logits grad.
    Tensor backward_from(const std::vector<Tensor>& feature_grads, bool accumulate_param_grads);

    // Mean over the batch of ||d(mean logits)/d(input)||^2 on real samples.
    // When accumulate is set, adds grad_scale * dR1/d(weights) into the param
    // grads via double backprop. Self-contained: does not disturb the caches
    // of a forward/backward pair in flight.
    double r1_penalty(const Tensor& real_batch, float grad_scale, bool accumulate);

    int min_input_size() const;
    int total_stride() const;
    const DiscriminatorConfig& config() const { return cfg_; }
    std::vector<retarget::nn::Param*> params();

private:
    Tensor apply_conv_with_bias(int i, const Tensor& x) const;

    DiscriminatorConfig cfg_;
    std::vector<std::unique_ptr<retarget::nn::Conv2d>> convs_;  // n_layers + 1
    std::vector<retarget::nn::LeakyReLU> lrelus_;               // n_layers
    bool unbatched_ = false;
};

}  // namespace retarget::net
