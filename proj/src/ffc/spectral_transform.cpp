#include "retarget/ffc/spectral_transform.hpp"

#include <stdexcept>

#include "retarget/core/error.hpp"

namespace retarget::ffc {

SpectralTransform::SpectralTransform(const std::string& name, int channels, int mid_channels,
                                     bool plain)
    : plain_(plain),
      conv_in_(name + ".conv_in", channels, mid_channels ? mid_channels : channels, 1),
      freq_conv_(name + ".freq_conv", 2 * (mid_channels ? mid_channels : channels),
                 2 * (mid_channels ? mid_channels : channels), 1),
      conv_out_(name + ".conv_out", mid_channels ? mid_channels : channels, channels, 1),
      freq_bn_(name + ".freq_bn", 2 * (mid_channels ? mid_channels : channels)),
      ifft_(0) {}

void SpectralTransform::init(retarget::Rng& rng) {
    conv_in_.init_kaiming(rng);
    freq_conv_.init_kaiming(rng);
    conv_out_.init_kaiming(rng);
}

void SpectralTransform::set_identity() {
    conv_in_.set_identity();
    freq_conv_.set_identity();
    conv_out_.set_identity();
}

Tensor SpectralTransform::forward(const Tensor& x, bool train) {
    ifft_.set_width(x.dim(x.rank() - 1));
    Tensor y = conv_in_.forward(x, train);
    y = fft_.forward(y, train);
    y = freq_conv_.forward(y, train);
    if (!plain_) {
        y = freq_bn_.forward(y, train);
        y = freq_relu_.forward(y, train);
    }
    y = ifft_.forward(y, train);
    y = conv_out_.forward(y, train);
    if (!y.all_finite())
        throw retarget::ModuleError("ffc_ops", "non-finite activations in spectral transform");
    return y;
}

Tensor SpectralTransform::backward(const Tensor& gy, bool acc) {
    Tensor g = conv_out_.backward(gy, acc);
    g = ifft_.backward(g, acc);
    if (!plain_) {
        g = freq_relu_.backward(g, acc);
        g = freq_bn_.backward(g, acc);
    }
    g = freq_conv_.backward(g, acc);
    g = fft_.backward(g, acc);
    return conv_in_.backward(g, acc);
}

void SpectralTransform::collect_params(std::vector<retarget::nn::Param*>& out) {
    conv_in_.collect_params(out);
    freq_conv_.collect_params(out);
    conv_out_.collect_params(out);
    if (!plain_) freq_bn_.collect_params(out);
}

void SpectralTransform::collect_buffers(std::vector<retarget::nn::BufferRef>& out) {
    if (!plain_) freq_bn_.collect_buffers(out);
}

}  // namespace retarget::ffc
