#pragma once

#include <memory>
#include <vector>

#include "retarget/nn/activations.hpp"
#include "retarget/nn/conv2d.hpp"

namespace retarget::loss {

using retarget::Tensor;

// Frozen feature extractor for the high-receptive-field perceptual loss.
// forward/backward pair semantics: backward propagates through the most
// recent forward call.
class PerceptualBackbone {
public:
    virtual ~PerceptualBackbone() = default;
    virtual std::vector<Tensor> forward(const Tensor& x) = 0;
    virtual Tensor backward(const std::vector<Tensor>& feature_grads) = 0;
    virtual std::vector<retarget::nn::Param*> params() { return {}; }
};

// phi = identity, a single "layer". Used by unit tests to pin the loss
// formula without any network in the way.
class IdentityBackbone : public PerceptualBackbone {
public:
    std::vector<Tensor> forward(const Tensor& x) override { return {x}; }
    Tensor backward(const std::vector<Tensor>& g) override { return g.at(0); }
};

// Strided + dilated conv pyramid with fixed-seed random weights: receptive
// field grows fast with depth, no pretrained weights needed. Any external
// segmentation-style backbone can be swapped in behind PerceptualBackbone.
class DilatedPyramidBackbone : public PerceptualBackbone {
public:
    explicit DilatedPyramidBackbone(uint64_t seed, int width = 16, int in_channels = 3);

    std::vector<Tensor> forward(const Tensor& x) override;
    Tensor backward(const std::vector<Tensor>& feature_grads) override;
    std::vector<retarget::nn::Param*> params() override;
    uint64_t param_hash() const;

private:
    std::vector<std::unique_ptr<retarget::nn::Conv2d>> convs_;
    std::vector<retarget::nn::ReLU> relus_;
};

}  // namespace retarget::loss
