#pragma once

#include "retarget/nn/layer.hpp"

namespace retarget::ffc {

using retarget::Tensor;

// Half-spectrum of a real 2-D signal, per channel: bins [C, H, W/2 + 1].
struct SpectrumTensor {
    Tensor real;  // [C, H, Wh]
    Tensor imag;  // [C, H, Wh]
    int width = 0;  // original spatial width W

    int half_width() const { return width / 2 + 1; }
};

// Unnormalized forward DFT per channel over the spatial dims, half-spectrum
// storage. inverse_real_fft2d(real_fft2d(x), H, W) == x up to float round-off.
SpectrumTensor real_fft2d(const Tensor& x);
Tensor inverse_real_fft2d(const SpectrumTensor& spec, int height, int width);

// Layer form used inside the spectral transform: [N, C, H, W] ->
// [N, 2C, H, Wh] with channels [0,C) = real parts, [C,2C) = imaginary parts.
class RealFFTLayer : public retarget::nn::Layer {
public:
    Tensor forward(const Tensor& x, bool train) override;
    Tensor backward(const Tensor& grad_out, bool accumulate_param_grads) override;

private:
    int in_h_ = 0, in_w_ = 0;
};

// Inverse of RealFFTLayer's packing: [N, 2C, H, Wh] -> [N, C, H, W].
class InverseRealFFTLayer : public retarget::nn::Layer {
public:
    explicit InverseRealFFTLayer(int width) : out_w_(width) {}
    Tensor forward(const Tensor& x, bool train) override;
    Tensor backward(const Tensor& grad_out, bool accumulate_param_grads) override;
    void set_width(int width) { out_w_ = width; }

private:
    int out_w_;
};

}  // namespace retarget::ffc
