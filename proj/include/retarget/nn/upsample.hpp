#pragma once

#include "retarget/nn/layer.hpp"

namespace retarget::nn {

// Nearest-neighbor 2x spatial upsampling.
class UpsampleNearest2x : public Layer {
public:
    Tensor forward(const Tensor& x, bool train) override;
    Tensor backward(const Tensor& grad_out, bool accumulate_param_grads) override;
};

}  // namespace retarget::nn
