#include "retarget/nn/activations.hpp"

#include <cmath>

namespace retarget::nn {

Tensor LeakyReLU::forward(const Tensor& x, bool /*train*/) {
    cached_input_ = x;
    Tensor out = x;
    for (int64_t i = 0; i < out.numel(); ++i)
        if (out[i] < 0.0f) out[i] *= slope_;
    return out;
}

Tensor LeakyReLU::backward(const Tensor& grad_out, bool /*accumulate*/) {
    Tensor dx = grad_out;
    for (int64_t i = 0; i < dx.numel(); ++i)
        if (cached_input_[i] < 0.0f) dx[i] *= slope_;
    return dx;
}

Tensor Sigmoid::forward(const Tensor& x, bool /*train*/) {
    Tensor out = x;
    for (int64_t i = 0; i < out.numel(); ++i)
        out[i] = 1.0f / (1.0f + std::exp(-out[i]));
    cached_output_ = out;
    return out;
}

Tensor Sigmoid::backward(const Tensor& grad_out, bool /*accumulate*/) {
    Tensor dx = grad_out;
    for (int64_t i = 0; i < dx.numel(); ++i) {
        const float y = cached_output_[i];
        dx[i] *= y * (1.0f - y);
    }
    return dx;
}

}  // namespace retarget::nn
