#include "retarget/ffc/ffc_block.hpp"

#include <stdexcept>

namespace retarget::ffc {

using retarget::nn::Conv2d;
using retarget::nn::PadMode;

FFCBlock::FFCBlock(const std::string& name, const FFCConfig& cfg) : cfg_(cfg) {
    const int li = cfg.local_in(), gi = cfg.global_in();
    const int lo = cfg.local_out(), go = cfg.global_out();
    const int k = cfg.kernel_size, pad = k / 2;
    if (li > 0 && lo > 0)
        conv_ll_ = std::make_unique<Conv2d>(name + ".conv_ll", li, lo, k, 1, pad, PadMode::Reflect);
    if (gi > 0 && lo > 0)
        conv_gl_ = std::make_unique<Conv2d>(name + ".conv_gl", gi, lo, k, 1, pad, PadMode::Reflect);
    if (li > 0 && go > 0)
        conv_lg_ = std::make_unique<Conv2d>(name + ".conv_lg", li, go, k, 1, pad, PadMode::Reflect);
    if (gi > 0 && go > 0)
        spectral_ = std::make_unique<SpectralTransform>(name + ".spectral", gi);
    if (lo > 0) bn_l_ = std::make_unique<retarget::nn::BatchNorm2d>(name + ".bn_l", lo);
    if (go > 0) bn_g_ = std::make_unique<retarget::nn::BatchNorm2d>(name + ".bn_g", go);
    if (spectral_ && gi != go)
        throw std::invalid_argument("ffc block: spectral path requires global_in == global_out");
}

void FFCBlock::init(retarget::Rng& rng) {
    if (conv_ll_) conv_ll_->init_kaiming(rng);
    if (conv_gl_) conv_gl_->init_kaiming(rng);
    if (conv_lg_) conv_lg_->init_kaiming(rng);
    if (spectral_) spectral_->init(rng);
}

std::pair<Tensor, Tensor> FFCBlock::forward(const Tensor& x_local, const Tensor& x_global,
                                            bool train) {
    const int li = cfg_.local_in(), gi = cfg_.global_in();
    if ((li > 0) != !x_local.empty() || (gi > 0) != !x_global.empty())
        throw std::runtime_error("ffc block: channel split mismatch");
    if (li > 0 && x_local.dim(x_local.rank() - 3) != li)
        throw std::runtime_error("ffc block: local channel count mismatch");
    if (gi > 0 && x_global.dim(x_global.rank() - 3) != gi)
        throw std::runtime_error("ffc block: global channel count mismatch");
    local_in_shape_ = x_local.shape();
    global_in_shape_ = x_global.shape();

    Tensor y_local, y_global;
    if (cfg_.local_out() > 0) {
        Tensor pre;
        if (conv_ll_) pre = conv_ll_->forward(x_local, train);
        if (conv_gl_) {
            Tensor t = conv_gl_->forward(x_global, train);
            if (pre.empty()) pre = std::move(t); else pre.add_(t);
        }
        y_local = relu_l_.forward(bn_l_->forward(pre, train), train);
    }
    if (cfg_.global_out() > 0) {
        Tensor pre;
        if (conv_lg_) pre = conv_lg_->forward(x_local, train);
        if (spectral_) {
            Tensor t = spectral_->forward(x_global, train);
            if (pre.empty()) pre = std::move(t); else pre.add_(t);
        }
        y_global = relu_g_.forward(bn_g_->forward(pre, train), train);
    }
    return {std::move(y_local), std::move(y_global)};
}

std::pair<Tensor, Tensor> FFCBlock::backward(const Tensor& g_local, const Tensor& g_global,
                                             bool acc) {
    Tensor dx_local, dx_global;
    if (cfg_.local_out() > 0 && !g_local.empty()) {
        Tensor g_pre = bn_l_->backward(relu_l_.backward(g_local, acc), acc);
        if (conv_ll_) dx_local = conv_ll_->backward(g_pre, acc);
        if (conv_gl_) dx_global = conv_gl_->backward(g_pre, acc);
    }
    if (cfg_.global_out() > 0 && !g_global.empty()) {
        Tensor g_pre = bn_g_->backward(relu_g_.backward(g_global, acc), acc);
        if (conv_lg_) {
            Tensor t = conv_lg_->backward(g_pre, acc);
            if (dx_local.empty()) dx_local = std::move(t); else dx_local.add_(t);
        }
        if (spectral_) {
            Tensor t = spectral_->backward(g_pre, acc);
            if (dx_global.empty()) dx_global = std::move(t); else dx_global.add_(t);
        }
    }
    return {std::move(dx_local), std::move(dx_global)};
}

void FFCBlock::collect_params(std::vector<retarget::nn::Param*>& out) {
    if (conv_ll_) conv_ll_->collect_params(out);
    if (conv_gl_) conv_gl_->collect_params(out);
    if (conv_lg_) conv_lg_->collect_params(out);
    if (spectral_) spectral_->collect_params(out);
    if (bn_l_) bn_l_->collect_params(out);
    if (bn_g_) bn_g_->collect_params(out);
}

void FFCBlock::collect_buffers(std::vector<retarget::nn::BufferRef>& out) {
    if (spectral_) spectral_->collect_buffers(out);
    if (bn_l_) bn_l_->collect_buffers(out);
    if (bn_g_) bn_g_->collect_buffers(out);
}

}  // namespace retarget::ffc
