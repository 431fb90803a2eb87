#include "retarget/nn/conv2d.hpp"

#include <Eigen/Dense>
#include <cassert>
#include <cmath>
#include <stdexcept>

namespace retarget::nn {

namespace {

using MatRM = Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MapM = Eigen::Map<MatRM>;
using CMapM = Eigen::Map<const MatRM>;

int reflect_index(int s, int n) {
    if (n == 1) return 0;
    while (s < 0 || s >= n) {
        if (s < 0) s = -s;
        if (s >= n) s = 2 * n - 2 - s;
    }
    return s;
}

void im2col(const float* src, int c_in, int hp, int wp, int k, int stride, int dil,
            int oh, int ow, float* col) {
    const int ohw = oh * ow;
    for (int c = 0; c < c_in; ++c) {
        for (int ky = 0; ky < k; ++ky) {
            for (int kx = 0; kx < k; ++kx) {
                float* dst = col + ((static_cast<size_t>(c) * k + ky) * k + kx) * ohw;
                const float* plane = src + static_cast<size_t>(c) * hp * wp;
                for (int oy = 0; oy < oh; ++oy) {
                    const float* row = plane + static_cast<size_t>(oy * stride + ky * dil) * wp + kx * dil;
                    float* out_row = dst + static_cast<size_t>(oy) * ow;
                    for (int ox = 0; ox < ow; ++ox) out_row[ox] = row[ox * stride];
                }
            }
        }
    }
}

void col2im_add(const float* col, int c_in, int hp, int wp, int k, int stride, int dil,
                int oh, int ow, float* dst) {
    const int ohw = oh * ow;
    for (int c = 0; c < c_in; ++c) {
        for (int ky = 0; ky < k; ++ky) {
            for (int kx = 0; kx < k; ++kx) {
                const float* src = col + ((static_cast<size_t>(c) * k + ky) * k + kx) * ohw;
                float* plane = dst + static_cast<size_t>(c) * hp * wp;
                for (int oy = 0; oy < oh; ++oy) {
                    float* row = plane + static_cast<size_t>(oy * stride + ky * dil) * wp + kx * dil;
                    const float* in_row = src + static_cast<size_t>(oy) * ow;
                    for (int ox = 0; ox < ow; ++ox) row[ox * stride] += in_row[ox];
                }
            }
        }
    }
}

}  // namespace

Conv2d::Conv2d(std::string name, int in_ch, int out_ch, int kernel, int stride, int pad,
               PadMode pad_mode, int dilation, bool has_bias)
    : in_ch_(in_ch), out_ch_(out_ch), kernel_(kernel), stride_(stride), pad_(pad),
      dilation_(dilation), pad_mode_(pad_mode), has_bias_(has_bias),
      weight_(name + ".weight", {out_ch, in_ch * kernel * kernel}),
      bias_(name + ".bias", {has_bias ? out_ch : 0}) {
    if (in_ch <= 0 || out_ch <= 0 || kernel <= 0 || stride <= 0 || dilation <= 0)
        throw std::invalid_argument("bad conv config");
}

void Conv2d::init_kaiming(Rng& rng) {
    const float std = std::sqrt(2.0f / static_cast<float>(in_ch_ * kernel_ * kernel_));
    for (int64_t i = 0; i < weight_.value.numel(); ++i) weight_.value[i] = gaussian(rng, 0.0f, std);
    if (has_bias_) bias_.value.fill(0.0f);
}

void Conv2d::set_identity() {
    assert(in_ch_ == out_ch_);
    weight_.value.fill(0.0f);
    const int center = (kernel_ / 2) * kernel_ + kernel_ / 2;
    for (int c = 0; c < out_ch_; ++c)
        weight_.value[static_cast<int64_t>(c) * in_ch_ * kernel_ * kernel_ +
                      c * kernel_ * kernel_ + center] = 1.0f;
    if (has_bias_) bias_.value.fill(0.0f);
}

std::vector<int> Conv2d::output_shape(const std::vector<int>& s) const {
    const int eff = dilation_ * (kernel_ - 1) + 1;
    const int h = s[s.size() - 2], w = s[s.size() - 1];
    const int oh = (h + 2 * pad_ - eff) / stride_ + 1;
    const int ow = (w + 2 * pad_ - eff) / stride_ + 1;
    if (oh < 1 || ow < 1) throw std::runtime_error("conv input smaller than kernel");
    if (s.size() == 3) return {out_ch_, oh, ow};
    return {s[0], out_ch_, oh, ow};
}

Tensor Conv2d::pad_input(const Tensor& x) const {
    const int n = x.dim(0), c = x.dim(1), h = x.dim(2), w = x.dim(3);
    if (c != in_ch_) throw std::runtime_error("conv channel mismatch");
    if (pad_ == 0) return x;
    Tensor p({n, c, h + 2 * pad_, w + 2 * pad_});
    const int hp = h + 2 * pad_, wp = w + 2 * pad_;
    for (int ni = 0; ni < n; ++ni)
        for (int ci = 0; ci < c; ++ci)
            for (int y = 0; y < hp; ++y) {
                int sy = y - pad_;
                if (pad_mode_ == PadMode::Reflect) sy = reflect_index(sy, h);
                if (sy < 0 || sy >= h) continue;  // zero pad
                for (int xx = 0; xx < wp; ++xx) {
                    int sx = xx - pad_;
                    if (pad_mode_ == PadMode::Reflect) sx = reflect_index(sx, w);
                    if (sx < 0 || sx >= w) continue;
                    p.at(ni, ci, y, xx) = x.at(ni, ci, sy, sx);
                }
            }
    return p;
}

Tensor Conv2d::unpad_grad(const Tensor& pg, int h, int w) const {
    if (pad_ == 0) return pg;
    const int n = pg.dim(0), c = pg.dim(1), hp = pg.dim(2), wp = pg.dim(3);
    Tensor g({n, c, h, w});
    for (int ni = 0; ni < n; ++ni)
        for (int ci = 0; ci < c; ++ci)
            for (int y = 0; y < hp; ++y) {
                int sy = y - pad_;
                if (pad_mode_ == PadMode::Reflect) sy = reflect_index(sy, h);
                if (sy < 0 || sy >= h) continue;
                for (int xx = 0; xx < wp; ++xx) {
                    int sx = xx - pad_;
                    if (pad_mode_ == PadMode::Reflect) sx = reflect_index(sx, w);
                    if (sx < 0 || sx >= w) continue;
                    g.at(ni, ci, sy, sx) += pg.at(ni, ci, y, xx);
                }
            }
    return g;
}

Tensor Conv2d::forward(const Tensor& x, bool /*train*/) {
    const bool batched = x.rank() == 4;
    const Tensor& xb = x;
    Tensor wrapped;
    const Tensor* in = &xb;
    if (!batched) {
        wrapped = Tensor({1, x.dim(0), x.dim(1), x.dim(2)},
                         std::vector<float>(x.data(), x.data() + x.numel()));
        in = &wrapped;
    }
    cached_input_shape_ = in->shape();
    cached_padded_ = pad_input(*in);

    const int n = in->dim(0), h = in->dim(2), w = in->dim(3);
    const int eff = dilation_ * (kernel_ - 1) + 1;
    const int hp = h + 2 * pad_, wp = w + 2 * pad_;
    const int oh = (hp - eff) / stride_ + 1, ow = (wp - eff) / stride_ + 1;
    if (oh < 1 || ow < 1) throw std::runtime_error("conv input smaller than kernel");
    const int ck = in_ch_ * kernel_ * kernel_, ohw = oh * ow;

    Tensor out({n, out_ch_, oh, ow});
    std::vector<float> col(static_cast<size_t>(ck) * ohw);
    CMapM wmat(weight_.value.data(), out_ch_, ck);
    for (int ni = 0; ni < n; ++ni) {
        im2col(cached_padded_.data() + static_cast<size_t>(ni) * in_ch_ * hp * wp,
               in_ch_, hp, wp, kernel_, stride_, dilation_, oh, ow, col.data());
        CMapM cmat(col.data(), ck, ohw);
        MapM ymat(out.data() + static_cast<size_t>(ni) * out_ch_ * ohw, out_ch_, ohw);
        ymat.noalias() = wmat * cmat;
        if (has_bias_)
            for (int c = 0; c < out_ch_; ++c) ymat.row(c).array() += bias_.value[c];
    }
    if (!batched) return Tensor({out_ch_, oh, ow},
                                std::vector<float>(out.data(), out.data() + out.numel()));
    return out;
}

Tensor Conv2d::backward(const Tensor& grad_out, bool accumulate_param_grads) {
    const bool batched = grad_out.rank() == 4;
    Tensor wrapped;
    const Tensor* gy = &grad_out;
    if (!batched) {
        wrapped = Tensor({1, grad_out.dim(0), grad_out.dim(1), grad_out.dim(2)},
                         std::vector<float>(grad_out.data(), grad_out.data() + grad_out.numel()));
        gy = &wrapped;
    }
    const int n = cached_input_shape_[0], h = cached_input_shape_[2], w = cached_input_shape_[3];
    const int hp = h + 2 * pad_, wp = w + 2 * pad_;
    const int oh = gy->dim(2), ow = gy->dim(3);
    const int ck = in_ch_ * kernel_ * kernel_, ohw = oh * ow;

    Tensor dpad({n, in_ch_, hp, wp});
    std::vector<float> col(static_cast<size_t>(ck) * ohw);
    std::vector<float> dcol(static_cast<size_t>(ck) * ohw);
    CMapM wmat(weight_.value.data(), out_ch_, ck);
    MapM dwmat(weight_.grad.data(), out_ch_, ck);
    for (int ni = 0; ni < n; ++ni) {
        CMapM gmat(gy->data() + static_cast<size_t>(ni) * out_ch_ * ohw, out_ch_, ohw);
        if (accumulate_param_grads) {
            im2col(cached_padded_.data() + static_cast<size_t>(ni) * in_ch_ * hp * wp,
                   in_ch_, hp, wp, kernel_, stride_, dilation_, oh, ow, col.data());
            CMapM cmat(col.data(), ck, ohw);
            dwmat.noalias() += gmat * cmat.transpose();
            if (has_bias_) {
                // plain loop: Eigen's redux order depends on buffer alignment,
                // which would make gradients vary run to run
                for (int c = 0; c < out_ch_; ++c) {
                    const float* row = gy->data() + (static_cast<size_t>(ni) * out_ch_ + c) * ohw;
                    float s = 0.0f;
                    for (int i = 0; i < ohw; ++i) s += row[i];
                    bias_.grad[c] += s;
                }
            }
        }
        MapM dcmat(dcol.data(), ck, ohw);
        dcmat.noalias() = wmat.transpose() * gmat;
        col2im_add(dcol.data(), in_ch_, hp, wp, kernel_, stride_, dilation_, oh, ow,
                   dpad.data() + static_cast<size_t>(ni) * in_ch_ * hp * wp);
    }
    Tensor dx = unpad_grad(dpad, h, w);
    if (!batched)
        return Tensor({in_ch_, h, w}, std::vector<float>(dx.data(), dx.data() + dx.numel()));
    return dx;
}

Tensor Conv2d::input_grad_of(const Tensor& g, const std::vector<int>& input_shape) const {
    assert(g.rank() == 4 && input_shape.size() == 4);
    const int n = input_shape[0], h = input_shape[2], w = input_shape[3];
    const int hp = h + 2 * pad_, wp = w + 2 * pad_;
    const int oh = g.dim(2), ow = g.dim(3);
    const int ck = in_ch_ * kernel_ * kernel_, ohw = oh * ow;

    Tensor dpad({n, in_ch_, hp, wp});
    std::vector<float> dcol(static_cast<size_t>(ck) * ohw);
    CMapM wmat(weight_.value.data(), out_ch_, ck);
    for (int ni = 0; ni < n; ++ni) {
        CMapM gmat(g.data() + static_cast<size_t>(ni) * out_ch_ * ohw, out_ch_, ohw);
        MapM dcmat(dcol.data(), ck, ohw);
        dcmat.noalias() = wmat.transpose() * gmat;
        col2im_add(dcol.data(), in_ch_, hp, wp, kernel_, stride_, dilation_, oh, ow,
                   dpad.data() + static_cast<size_t>(ni) * in_ch_ * hp * wp);
    }
    return unpad_grad(dpad, h, w);
}

Tensor Conv2d::forward_linear(const Tensor& x) const {
    assert(x.rank() == 4);
    Tensor padded = pad_input(x);
    const int n = x.dim(0), h = x.dim(2), w = x.dim(3);
    const int eff = dilation_ * (kernel_ - 1) + 1;
    const int hp = h + 2 * pad_, wp = w + 2 * pad_;
    const int oh = (hp - eff) / stride_ + 1, ow = (wp - eff) / stride_ + 1;
    const int ck = in_ch_ * kernel_ * kernel_, ohw = oh * ow;

    Tensor out({n, out_ch_, oh, ow});
    std::vector<float> col(static_cast<size_t>(ck) * ohw);
    CMapM wmat(weight_.value.data(), out_ch_, ck);
    for (int ni = 0; ni < n; ++ni) {
        im2col(padded.data() + static_cast<size_t>(ni) * in_ch_ * hp * wp,
               in_ch_, hp, wp, kernel_, stride_, dilation_, oh, ow, col.data());
        CMapM cmat(col.data(), ck, ohw);
        MapM ymat(out.data() + static_cast<size_t>(ni) * out_ch_ * ohw, out_ch_, ohw);
        ymat.noalias() = wmat * cmat;
    }
    return out;
}

void Conv2d::accumulate_weight_grad_pair(const Tensor& v, const Tensor& upstream, float scale) {
    assert(v.rank() == 4 && upstream.rank() == 4);
    Tensor padded = pad_input(v);
    const int n = v.dim(0), h = v.dim(2), w = v.dim(3);
    const int hp = h + 2 * pad_, wp = w + 2 * pad_;
    const int oh = upstream.dim(2), ow = upstream.dim(3);
    const int ck = in_ch_ * kernel_ * kernel_, ohw = oh * ow;

    std::vector<float> col(static_cast<size_t>(ck) * ohw);
    MapM dwmat(weight_.grad.data(), out_ch_, ck);
    for (int ni = 0; ni < n; ++ni) {
        im2col(padded.data() + static_cast<size_t>(ni) * in_ch_ * hp * wp,
               in_ch_, hp, wp, kernel_, stride_, dilation_, oh, ow, col.data());
        CMapM cmat(col.data(), ck, ohw);
        CMapM gmat(upstream.data() + static_cast<size_t>(ni) * out_ch_ * ohw, out_ch_, ohw);
        dwmat.noalias() += scale * (gmat * cmat.transpose());
    }
}

void Conv2d::collect_params(std::vector<Param*>& out) {
    out.push_back(&weight_);
    if (has_bias_) out.push_back(&bias_);
}

}  // namespace retarget::nn
