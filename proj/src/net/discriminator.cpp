#include "retarget/net/discriminator.hpp"

#include <algorithm>
#include <string>

#include "retarget/core/error.hpp"
#include "retarget/core/rng.hpp"

namespace retarget::net {

using retarget::nn::Conv2d;
using retarget::nn::PadMode;

Discriminator::Discriminator(const DiscriminatorConfig& cfg) : cfg_(cfg) {
    int cin = cfg.in_channels;
    for (int i = 0; i < cfg.n_layers; ++i) {
        const int cout = std::min(cfg.base_width << i, cfg.width_cap);
        const int stride = (i < cfg.n_layers - 1) ? 2 : 1;
        convs_.push_back(std::make_unique<Conv2d>("disc.conv" + std::to_string(i), cin, cout, 4,
                                                  stride, 1, PadMode::Zero));
        lrelus_.emplace_back(cfg.leaky_slope);
        cin = cout;
    }
    convs_.push_back(std::make_unique<Conv2d>("disc.logits", cin, 1, 4, 1, 1, PadMode::Zero));
}

void Discriminator::init(uint64_t seed) {
    Rng rng(seed);
    for (auto& c : convs_) c->init_kaiming(rng);
}

int Discriminator::total_stride() const { return 1 << (cfg_.n_layers - 1); }

int Discriminator::min_input_size() const {
    // Receptive field of one logits cell: 4x4 kernels, strides 2^.. then 1.
    int rf = 1, s = 1;
    for (int i = 0; i < cfg_.n_layers + 1; ++i) {
        rf += 3 * s;
        if (i < cfg_.n_layers - 1) s *= 2;
    }
    return rf;
}

Discriminator::Output Discriminator::forward(const Tensor& img, bool train) {
    unbatched_ = img.rank() == 3;
    Tensor x = unbatched_
        ? Tensor({1, img.dim(0), img.dim(1), img.dim(2)},
                 std::vector<float>(img.data(), img.data() + img.numel()))
        : img;
    if (x.dim(2) < min_input_size() || x.dim(3) < min_input_size())
        throw ModuleError("discriminator_net",
                          "input smaller than the " + std::to_string(min_input_size()) +
                              "px receptive field");
    Output out;
    for (int i = 0; i < cfg_.n_layers; ++i) {
        x = lrelus_[static_cast<size_t>(i)].forward(convs_[static_cast<size_t>(i)]->forward(x, train), train);
        out.features.push_back(x);
    }
    out.logits = convs_.back()->forward(x, train);
    out.features.push_back(out.logits);
    return out;
}

Tensor Discriminator::forward_logits(const Tensor& img, bool train) {
    return forward(img, train).logits;
}

Tensor Discriminator::backward_from(const std::vector<Tensor>& feature_grads, bool acc) {
    Tensor g;
    if (!feature_grads.back().empty()) g = feature_grads.back();
    if (g.empty()) throw ModuleError("discriminator_net", "missing logits gradient");
    g = convs_.back()->backward(g, acc);
    for (int i = cfg_.n_layers - 1; i >= 0; --i) {
        if (static_cast<size_t>(i) < feature_grads.size() - 1 &&
            !feature_grads[static_cast<size_t>(i)].empty())
            g.add_(feature_grads[static_cast<size_t>(i)]);
        g = convs_[static_cast<size_t>(i)]->backward(
            lrelus_[static_cast<size_t>(i)].backward(g, acc), acc);
    }
    return g;
}

Tensor Discriminator::apply_conv_with_bias(int i, const Tensor& x) const {
    Tensor y = convs_[static_cast<size_t>(i)]->forward_linear(x);
    if (convs_[static_cast<size_t>(i)]->has_bias()) {
        const auto& b = const_cast<Conv2d&>(*convs_[static_cast<size_t>(i)]).bias().value;
        const int n = y.dim(0), c = y.dim(1);
        const int64_t plane = static_cast<int64_t>(y.dim(2)) * y.dim(3);
        for (int ni = 0; ni < n; ++ni)
            for (int ci = 0; ci < c; ++ci) {
                float* p = y.data() + (static_cast<int64_t>(ni) * c + ci) * plane;
                for (int64_t k = 0; k < plane; ++k) p[k] += b[ci];
            }
    }
    return y;
}

double Discriminator::r1_penalty(const Tensor& real_batch, float grad_scale, bool accumulate) {
    Tensor x = real_batch.rank() == 3
        ? Tensor({1, real_batch.dim(0), real_batch.dim(1), real_batch.dim(2)},
                 std::vector<float>(real_batch.data(),
                                    real_batch.data() + real_batch.numel()))
        : real_batch;
    const int n = x.dim(0);
    const int nl = cfg_.n_layers;
    const float slope = cfg_.leaky_slope;

    // Stateless forward; keep activations and LeakyReLU masks.
    std::vector<Tensor> acts(static_cast<size_t>(nl) + 1);  // acts[0] = input
    std::vector<Tensor> masks(static_cast<size_t>(nl));
    acts[0] = x;
    for (int i = 0; i < nl; ++i) {
        Tensor a = apply_conv_with_bias(i, acts[static_cast<size_t>(i)]);
        Tensor m = a;
        for (int64_t k = 0; k < m.numel(); ++k) m[k] = a[k] > 0.0f ? 1.0f : slope;
        for (int64_t k = 0; k < a.numel(); ++k) a[k] *= m[k];
        masks[static_cast<size_t>(i)] = std::move(m);
        acts[static_cast<size_t>(i) + 1] = std::move(a);
    }
    const auto logits_shape = convs_.back()->output_shape(acts[static_cast<size_t>(nl)].shape());

    // Input gradient of the per-sample mean logit.
    const int64_t cells = static_cast<int64_t>(logits_shape[2]) * logits_shape[3];
    Tensor d_top = Tensor::full(logits_shape, 1.0f / static_cast<float>(cells));
    std::vector<Tensor> d(static_cast<size_t>(nl) + 1);  // d[i] = grad at pre-activation of conv i
    d[static_cast<size_t>(nl)] = d_top;
    Tensor u = convs_.back()->input_grad_of(d_top, acts[static_cast<size_t>(nl)].shape());
    for (int i = nl - 1; i >= 0; --i) {
        Tensor di = u;
        const Tensor& m = masks[static_cast<size_t>(i)];
        for (int64_t k = 0; k < di.numel(); ++k) di[k] *= m[k];
        d[static_cast<size_t>(i)] = std::move(di);
        u = convs_[static_cast<size_t>(i)]->input_grad_of(d[static_cast<size_t>(i)],
                                                          acts[static_cast<size_t>(i)].shape());
    }
    const double r1 = u.sq_sum() / n;

    if (accumulate) {
        // Second adjoint pass: differentiate ||u||^2/N w.r.t. the conv
        // weights, treating the LeakyReLU masks as constant (their derivative
        // vanishes almost everywhere). Biases receive no gradient.
        Tensor v = u;
        v.scale_(2.0f / static_cast<float>(n));
        for (int i = 0; i < nl; ++i) {
            convs_[static_cast<size_t>(i)]->accumulate_weight_grad_pair(
                v, d[static_cast<size_t>(i)], grad_scale);
            v = convs_[static_cast<size_t>(i)]->forward_linear(v);
            const Tensor& m = masks[static_cast<size_t>(i)];
            for (int64_t k = 0; k < v.numel(); ++k) v[k] *= m[k];
        }
        convs_.back()->accumulate_weight_grad_pair(v, d[static_cast<size_t>(nl)], grad_scale);
    }
    return r1;
}

std::vector<retarget::nn::Param*> Discriminator::params() {
    std::vector<retarget::nn::Param*> out;
    for (auto& c : convs_) c->collect_params(out);
    return out;
}

}  // namespace retarget::net
