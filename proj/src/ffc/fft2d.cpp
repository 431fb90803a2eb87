#include "retarget/ffc/fft2d.hpp"

#include <fftw3.h>

#include <cassert>
#include <cstring>
#include <map>
#include <stdexcept>
#include <tuple>
#include <vector>

namespace retarget::ffc {

namespace {

// One cached FFTW c2c plan per (H, W, sign), with owned buffers. Single
// threaded: execution copies through the owned buffers.
struct CplxPlan {
    fftw_plan plan = nullptr;
    fftw_complex* in = nullptr;
    fftw_complex* out = nullptr;

    ~CplxPlan() {
        if (plan) fftw_destroy_plan(plan);
        if (in) fftw_free(in);
        if (out) fftw_free(out);
    }
};

CplxPlan& get_plan(int h, int w, int sign) {
    static std::map<std::tuple<int, int, int>, CplxPlan> cache;
    auto key = std::make_tuple(h, w, sign);
    auto it = cache.find(key);
    if (it == cache.end()) {
        CplxPlan& p = cache[key];
        p.in = fftw_alloc_complex(static_cast<size_t>(h) * w);
        p.out = fftw_alloc_complex(static_cast<size_t>(h) * w);
        p.plan = fftw_plan_dft_2d(h, w, p.in, p.out, sign, FFTW_ESTIMATE);
        return p;
    }
    return it->second;
}

// Unnormalized 2-D complex DFT of one plane. Double precision internally so
// float-level accuracy survives the round trip.
void fft2_c2c(const float* re_in, const float* im_in, int h, int w, int sign,
              float* re_out, float* im_out) {
    CplxPlan& p = get_plan(h, w, sign);
    const size_t n = static_cast<size_t>(h) * w;
    for (size_t i = 0; i < n; ++i) {
        p.in[i][0] = re_in[i];
        p.in[i][1] = im_in ? im_in[i] : 0.0;
    }
    fftw_execute(p.plan);
    for (size_t i = 0; i < n; ++i) {
        re_out[i] = static_cast<float>(p.out[i][0]);
        if (im_out) im_out[i] = static_cast<float>(p.out[i][1]);
    }
}

}  // namespace

SpectrumTensor real_fft2d(const Tensor& x) {
    assert(x.rank() == 3);
    const int c = x.dim(0), h = x.dim(1), w = x.dim(2);
    if (h < 1 || w < 1) throw std::invalid_argument("real_fft2d: empty spatial dims");
    const int wh = w / 2 + 1;
    SpectrumTensor spec;
    spec.width = w;
    spec.real = Tensor({c, h, wh});
    spec.imag = Tensor({c, h, wh});
    std::vector<float> re(static_cast<size_t>(h) * w), im(static_cast<size_t>(h) * w);
    for (int ci = 0; ci < c; ++ci) {
        fft2_c2c(x.data() + static_cast<size_t>(ci) * h * w, nullptr, h, w, FFTW_FORWARD,
                 re.data(), im.data());
        for (int ky = 0; ky < h; ++ky)
            for (int kx = 0; kx < wh; ++kx) {
                spec.real.at(ci, ky, kx) = re[static_cast<size_t>(ky) * w + kx];
                spec.imag.at(ci, ky, kx) = im[static_cast<size_t>(ky) * w + kx];
            }
    }
    return spec;
}

Tensor inverse_real_fft2d(const SpectrumTensor& spec, int height, int width) {
    const int c = spec.real.dim(0), h = spec.real.dim(1), wh = spec.real.dim(2);
    if (h != height || wh != width / 2 + 1)
        throw std::invalid_argument("inverse_real_fft2d: dims do not match spectrum");
    const float norm = 1.0f / (static_cast<float>(height) * width);
    Tensor out({c, height, width});
    std::vector<float> re_full(static_cast<size_t>(height) * width);
    std::vector<float> im_full(static_cast<size_t>(height) * width);
    std::vector<float> re_out(static_cast<size_t>(height) * width);
    for (int ci = 0; ci < c; ++ci) {
        // Hermitian extension of the stored half.
        for (int ky = 0; ky < height; ++ky)
            for (int kx = 0; kx < width; ++kx) {
                const size_t idx = static_cast<size_t>(ky) * width + kx;
                if (kx < wh) {
                    re_full[idx] = spec.real.at(ci, ky, kx);
                    im_full[idx] = spec.imag.at(ci, ky, kx);
                } else {
                    const int my = (height - ky) % height;
                    const int mx = width - kx;
                    re_full[idx] = spec.real.at(ci, my, mx);
                    im_full[idx] = -spec.imag.at(ci, my, mx);
                }
            }
        fft2_c2c(re_full.data(), im_full.data(), height, width, FFTW_BACKWARD,
                 re_out.data(), nullptr);
        float* dst = out.data() + static_cast<size_t>(ci) * height * width;
        for (size_t i = 0; i < static_cast<size_t>(height) * width; ++i) dst[i] = re_out[i] * norm;
    }
    return out;
}

Tensor RealFFTLayer::forward(const Tensor& x, bool /*train*/) {
    assert(x.rank() == 4);
    const int n = x.dim(0), c = x.dim(1), h = x.dim(2), w = x.dim(3);
    in_h_ = h;
    in_w_ = w;
    const int wh = w / 2 + 1;
    Tensor out({n, 2 * c, h, wh});
    std::vector<float> re(static_cast<size_t>(h) * w), im(static_cast<size_t>(h) * w);
    for (int ni = 0; ni < n; ++ni)
        for (int ci = 0; ci < c; ++ci) {
            fft2_c2c(x.data() + (static_cast<size_t>(ni) * c + ci) * h * w, nullptr, h, w,
                     FFTW_FORWARD, re.data(), im.data());
            for (int ky = 0; ky < h; ++ky)
                for (int kx = 0; kx < wh; ++kx) {
                    out.at(ni, ci, ky, kx) = re[static_cast<size_t>(ky) * w + kx];
                    out.at(ni, c + ci, ky, kx) = im[static_cast<size_t>(ky) * w + kx];
                }
        }
    return out;
}

Tensor RealFFTLayer::backward(const Tensor& gy, bool /*accumulate*/) {
    // Adjoint of the real-to-half-spectrum map: place the (re, im) gradient on
    // the stored bins of a full grid, run an unnormalized inverse DFT, keep the
    // real part.
    assert(gy.rank() == 4);
    const int n = gy.dim(0), c2 = gy.dim(1), h = in_h_, w = in_w_;
    const int c = c2 / 2, wh = gy.dim(3);
    Tensor dx({n, c, h, w});
    std::vector<float> re_full(static_cast<size_t>(h) * w);
    std::vector<float> im_full(static_cast<size_t>(h) * w);
    std::vector<float> re_out(static_cast<size_t>(h) * w);
    for (int ni = 0; ni < n; ++ni)
        for (int ci = 0; ci < c; ++ci) {
            std::fill(re_full.begin(), re_full.end(), 0.0f);
            std::fill(im_full.begin(), im_full.end(), 0.0f);
            for (int ky = 0; ky < h; ++ky)
                for (int kx = 0; kx < wh; ++kx) {
                    re_full[static_cast<size_t>(ky) * w + kx] = gy.at(ni, ci, ky, kx);
                    im_full[static_cast<size_t>(ky) * w + kx] = gy.at(ni, c + ci, ky, kx);
                }
            fft2_c2c(re_full.data(), im_full.data(), h, w, FFTW_BACKWARD, re_out.data(), nullptr);
            std::memcpy(dx.data() + (static_cast<size_t>(ni) * c + ci) * h * w, re_out.data(),
                        sizeof(float) * h * w);
        }
    return dx;
}

Tensor InverseRealFFTLayer::forward(const Tensor& x, bool /*train*/) {
    assert(x.rank() == 4);
    const int n = x.dim(0), c2 = x.dim(1), h = x.dim(2), wh = x.dim(3);
    const int c = c2 / 2, w = out_w_;
    if (wh != w / 2 + 1) throw std::runtime_error("inverse fft layer: width mismatch");
    Tensor out({n, c, h, w});
    SpectrumTensor spec;
    spec.width = w;
    spec.real = Tensor({1, h, wh});
    spec.imag = Tensor({1, h, wh});
    for (int ni = 0; ni < n; ++ni)
        for (int ci = 0; ci < c; ++ci) {
            for (int ky = 0; ky < h; ++ky)
                for (int kx = 0; kx < wh; ++kx) {
                    spec.real.at(0, ky, kx) = x.at(ni, ci, ky, kx);
                    spec.imag.at(0, ky, kx) = x.at(ni, c + ci, ky, kx);
                }
            Tensor plane = inverse_real_fft2d(spec, h, w);
            std::memcpy(out.data() + (static_cast<size_t>(ni) * c + ci) * h * w, plane.data(),
                        sizeof(float) * h * w);
        }
    return out;
}

Tensor InverseRealFFTLayer::backward(const Tensor& gy, bool /*accumulate*/) {
    // Adjoint: forward DFT of the real gradient scaled by 1/(HW), with the
    // mirrored columns double-counted (they appear twice in the extension).
    assert(gy.rank() == 4);
    const int n = gy.dim(0), c = gy.dim(1), h = gy.dim(2), w = gy.dim(3);
    const int wh = w / 2 + 1;
    const float norm = 1.0f / (static_cast<float>(h) * w);
    const int mirror_last = (w % 2 == 0) ? w / 2 - 1 : wh - 1;  // columns 1..mirror_last are doubled
    Tensor dx({n, 2 * c, h, wh});
    std::vector<float> re(static_cast<size_t>(h) * w), im(static_cast<size_t>(h) * w);
    for (int ni = 0; ni < n; ++ni)
        for (int ci = 0; ci < c; ++ci) {
            fft2_c2c(gy.data() + (static_cast<size_t>(ni) * c + ci) * h * w, nullptr, h, w,
                     FFTW_FORWARD, re.data(), im.data());
            for (int ky = 0; ky < h; ++ky)
                for (int kx = 0; kx < wh; ++kx) {
                    const float s = (kx >= 1 && kx <= mirror_last) ? 2.0f : 1.0f;
                    dx.at(ni, ci, ky, kx) = s * norm * re[static_cast<size_t>(ky) * w + kx];
                    dx.at(ni, c + ci, ky, kx) = s * norm * im[static_cast<size_t>(ky) * w + kx];
                }
        }
    return dx;
}

}  // namespace retarget::ffc
