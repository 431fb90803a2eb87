#pragma once

#include "retarget/core/rng.hpp"
#include "retarget/nn/layer.hpp"

namespace retarget::nn {

enum class PadMode { Zero, Reflect };  // Reflect is reflect-101 (edge not repeated)

class Conv2d : public Layer {
public:
    Conv2d(std::string name, int in_ch, int out_ch, int kernel, int stride = 1,
           int pad = 0, PadMode pad_mode = PadMode::Zero, int dilation = 1,
           bool has_bias = true);

    void init_kaiming(Rng& rng);
    void set_identity();  // requires in_ch == out_ch; center tap = 1

    Tensor forward(const Tensor& x, bool train) override;
    Tensor backward(const Tensor& grad_out, bool accumulate_param_grads) override;

    // Gradient of <v, conv_input_grad(upstream)> w.r.t. the weight, where
    // conv_input_grad is this layer's backward-to-input map. Needed by the
    // double backprop of the R1 penalty. Equivalent to the weight gradient of
    // a forward pass with input v and output gradient upstream.
    void accumulate_weight_grad_pair(const Tensor& v, const Tensor& upstream, float scale);

    // Applies the backward-to-input linear map to an arbitrary tensor shaped
    // like this layer's output (no caching involved).
    Tensor input_grad_of(const Tensor& grad_out_like, const std::vector<int>& input_shape) const;
    // Applies the forward linear map (no bias, no caching) to an arbitrary
    // input-shaped tensor.
    Tensor forward_linear(const Tensor& x_like) const;

    Param& weight() { return weight_; }
    Param& bias() { return bias_; }
    bool has_bias() const { return has_bias_; }
    int in_channels() const { return in_ch_; }
    int out_channels() const { return out_ch_; }
    int kernel() const { return kernel_; }
    int stride() const { return stride_; }

    std::vector<int> output_shape(const std::vector<int>& input_shape) const;

    void collect_params(std::vector<Param*>& out) override;

private:
    Tensor pad_input(const Tensor& x) const;
    Tensor unpad_grad(const Tensor& padded_grad, int h, int w) const;

    int in_ch_, out_ch_, kernel_, stride_, pad_, dilation_;
    PadMode pad_mode_;
    bool has_bias_;
    Param weight_;  // [out_ch, in_ch * k * k]
    Param bias_;    // [out_ch]
    Tensor cached_padded_;           // [N, C, Hp, Wp]
    std::vector<int> cached_input_shape_;
};

}  // namespace retarget::nn
