#include "retarget/net/generator.hpp"

#include <algorithm>
#include <string>

#include "retarget/core/error.hpp"
#include "retarget/core/rng.hpp"

namespace retarget::net {

using retarget::nn::BatchNorm2d;
using retarget::nn::Conv2d;
using retarget::nn::PadMode;

int GeneratorConfig::width_at(int level) const {
    return std::min(base_width << level, max_width);
}

Generator::Generator(const GeneratorConfig& cfg) : cfg_(cfg) {
    if (cfg.n_down != cfg.n_up)
        throw ModuleError("generator_net", "n_down must equal n_up");

    stem_.conv = std::make_unique<Conv2d>("gen.stem", cfg.in_channels, cfg.base_width, 7, 1, 3,
                                          PadMode::Reflect);
    stem_.bn = std::make_unique<BatchNorm2d>("gen.stem_bn", cfg.base_width);

    for (int i = 0; i < cfg.n_down; ++i) {
        ConvBlock b;
        const int cin = cfg.width_at(i), cout = cfg.width_at(i + 1);
        b.conv = std::make_unique<Conv2d>("gen.down" + std::to_string(i), cin, cout, 3, 2, 1,
                                          PadMode::Reflect);
        b.bn = std::make_unique<BatchNorm2d>("gen.down" + std::to_string(i) + "_bn", cout);
        down_.push_back(std::move(b));
    }

    const int trunk = cfg.width_at(cfg.n_down);
    for (int i = 0; i < cfg.n_residual; ++i) {
        ResBlock r;
        retarget::ffc::FFCConfig fc;
        fc.channels_in = trunk;
        fc.channels_out = trunk;
        fc.global_ratio = cfg.ffc_global_ratio;
        fc.kernel_size = cfg.ffc_kernel;
        r.ffc = std::make_unique<retarget::ffc::FFCBlock>("gen.res" + std::to_string(i), fc);
        residual_.push_back(std::move(r));
    }

    for (int i = 0; i < cfg.n_up; ++i) {
        ConvBlock b;
        const int cin = cfg.width_at(cfg.n_down - i), cout = cfg.width_at(cfg.n_down - i - 1);
        b.conv = std::make_unique<Conv2d>("gen.up" + std::to_string(i), cin, cout, 3, 1, 1,
                                          PadMode::Reflect);
        b.bn = std::make_unique<BatchNorm2d>("gen.up" + std::to_string(i) + "_bn", cout);
        up_.push_back(std::move(b));
        up_samplers_.push_back(std::make_unique<retarget::nn::UpsampleNearest2x>());
    }

    head_ = std::make_unique<Conv2d>("gen.head", cfg.base_width, cfg.out_channels, 7, 1, 3,
                                     PadMode::Reflect);
}

void Generator::init(uint64_t seed) {
    Rng rng(seed);
    stem_.conv->init_kaiming(rng);
    for (auto& b : down_) b.conv->init_kaiming(rng);
    for (auto& r : residual_) r.ffc->init(rng);
    for (auto& b : up_) b.conv->init_kaiming(rng);
    head_->init_kaiming(rng);
}

Tensor Generator::forward(const Tensor& x, bool train) {
    unbatched_ = x.rank() == 3;
    Tensor y = unbatched_
        ? Tensor({1, x.dim(0), x.dim(1), x.dim(2)},
                 std::vector<float>(x.data(), x.data() + x.numel()))
        : x;
    const int h = y.dim(2), w = y.dim(3), f = cfg_.stride_factor();
    if (h % f != 0 || w % f != 0)
        throw ModuleError("generator_net",
                          "dims must be divisible by " + std::to_string(f));
    if (y.dim(1) != cfg_.in_channels)
        throw ModuleError("generator_net", "expected " + std::to_string(cfg_.in_channels) +
                                               " input channels, got " + std::to_string(y.dim(1)));

    y = stem_.relu.forward(stem_.bn->forward(stem_.conv->forward(y, train), train), train);
    for (auto& b : down_)
        y = b.relu.forward(b.bn->forward(b.conv->forward(y, train), train), train);

    const int local = residual_.empty() ? 0 : residual_[0].ffc->config().local_in();
    for (auto& r : residual_) {
        r.skip_input = y;
        Tensor xl = local > 0 ? channel_slice(y, 0, local) : Tensor();
        Tensor xg = channel_slice(y, local, y.dim(1));
        auto [yl, yg] = r.ffc->forward(xl, xg, train);
        y = channel_concat(yl, yg);
        y.add_(r.skip_input);
    }

    for (size_t i = 0; i < up_.size(); ++i) {
        y = up_samplers_[i]->forward(y, train);
        y = up_[i].relu.forward(up_[i].bn->forward(up_[i].conv->forward(y, train), train), train);
    }
    y = out_act_.forward(head_->forward(y, train), train);

    if (unbatched_)
        return Tensor({y.dim(1), y.dim(2), y.dim(3)},
                      std::vector<float>(y.data(), y.data() + y.numel()));
    return y;
}

Tensor Generator::backward(const Tensor& grad_out, bool acc) {
    Tensor g = grad_out.rank() == 3
        ? Tensor({1, grad_out.dim(0), grad_out.dim(1), grad_out.dim(2)},
                 std::vector<float>(grad_out.data(), grad_out.data() + grad_out.numel()))
        : grad_out;
    g = head_->backward(out_act_.backward(g, acc), acc);
    for (int i = static_cast<int>(up_.size()) - 1; i >= 0; --i) {
        g = up_[i].conv->backward(up_[i].bn->backward(up_[i].relu.backward(g, acc), acc), acc);
        g = up_samplers_[static_cast<size_t>(i)]->backward(g, acc);
    }

    const int local = residual_.empty() ? 0 : residual_[0].ffc->config().local_in();
    for (int i = static_cast<int>(residual_.size()) - 1; i >= 0; --i) {
        Tensor gl = local > 0 ? channel_slice(g, 0, local) : Tensor();
        Tensor gg = channel_slice(g, local, g.dim(1));
        auto [dl, dg] = residual_[static_cast<size_t>(i)].ffc->backward(gl, gg, acc);
        Tensor dx = channel_concat(dl, dg);
        dx.add_(g);  // identity skip
        g = std::move(dx);
    }

    for (int i = static_cast<int>(down_.size()) - 1; i >= 0; --i)
        g = down_[static_cast<size_t>(i)].conv->backward(
            down_[static_cast<size_t>(i)].bn->backward(
                down_[static_cast<size_t>(i)].relu.backward(g, acc), acc), acc);
    g = stem_.conv->backward(stem_.bn->backward(stem_.relu.backward(g, acc), acc), acc);

    if (unbatched_)
        return Tensor({g.dim(1), g.dim(2), g.dim(3)},
                      std::vector<float>(g.data(), g.data() + g.numel()));
    return g;
}

std::vector<retarget::nn::Param*> Generator::params() {
    std::vector<retarget::nn::Param*> out;
    stem_.conv->collect_params(out);
    stem_.bn->collect_params(out);
    for (auto& b : down_) {
        b.conv->collect_params(out);
        b.bn->collect_params(out);
    }
    for (auto& r : residual_) r.ffc->collect_params(out);
    for (auto& b : up_) {
        b.conv->collect_params(out);
        b.bn->collect_params(out);
    }
    head_->collect_params(out);
    return out;
}

std::vector<retarget::nn::BufferRef> Generator::buffers() {
    std::vector<retarget::nn::BufferRef> out;
    stem_.bn->collect_buffers(out);
    for (auto& b : down_) b.bn->collect_buffers(out);
    for (auto& r : residual_) r.ffc->collect_buffers(out);
    for (auto& b : up_) b.bn->collect_buffers(out);
    return out;
}

int64_t Generator::param_count() {
    int64_t n = 0;
    for (auto* p : params()) n += p->value.numel();
    return n;
}

}  // namespace retarget::net
