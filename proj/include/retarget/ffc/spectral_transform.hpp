#pragma once

#include <memory>

#include "retarget/ffc/fft2d.hpp"
#include "retarget/nn/batchnorm.hpp"
#include "retarget/nn/conv2d.hpp"
#include "retarget/nn/activations.hpp"

namespace retarget::ffc {

// Global-branch pipeline of the FFC: 1x1 conv -> channel-wise real FFT with
// (re, im) stacked as channels -> 1x1 conv + batch norm + ReLU in the
// frequency domain -> inverse FFT -> 1x1 conv. Output spatial dims equal the
// input's; the receptive field is the whole image.
class SpectralTransform : public retarget::nn::Layer {
public:
    // plain = no normalization / activation; with identity convs the layer is
    // then an FFT round trip (test mode).
    SpectralTransform(const std::string& name, int channels, int mid_channels = 0,
                      bool plain = false);

    Tensor forward(const Tensor& x, bool train) override;
    Tensor backward(const Tensor& grad_out, bool accumulate_param_grads) override;

    void init(retarget::Rng& rng);
    void set_identity();  // requires mid_channels == channels

    void collect_params(std::vector<retarget::nn::Param*>& out) override;
    void collect_buffers(std::vector<retarget::nn::BufferRef>& out) override;

private:
    bool plain_;
    retarget::nn::Conv2d conv_in_, freq_conv_, conv_out_;
    retarget::nn::BatchNorm2d freq_bn_;
    retarget::nn::ReLU freq_relu_;
    RealFFTLayer fft_;
    InverseRealFFTLayer ifft_;
};

}  // namespace retarget::ffc
