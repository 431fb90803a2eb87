#pragma once

#include "retarget/nn/layer.hpp"

namespace retarget::nn {

class LeakyReLU : public Layer {
public:
    explicit LeakyReLU(float slope = 0.0f) : slope_(slope) {}
    Tensor forward(const Tensor& x, bool train) override;
    Tensor backward(const Tensor& grad_out, bool accumulate_param_grads) override;
    float slope() const { return slope_; }

private:
    float slope_;
    Tensor cached_input_;
};

class ReLU : public LeakyReLU {
public:
    ReLU() : LeakyReLU(0.0f) {}
};

class Sigmoid : public Layer {
public:
    Tensor forward(const Tensor& x, bool train) override;
    Tensor backward(const Tensor& grad_out, bool accumulate_param_grads) override;

private:
    Tensor cached_output_;
};

}  // namespace retarget::nn
