#include "retarget/nn/batchnorm.hpp"

#include <cassert>
#include <cmath>
#include <stdexcept>

namespace retarget::nn {

BatchNorm2d::BatchNorm2d(std::string name, int channels, float eps, float momentum)
    : channels_(channels), eps_(eps), momentum_(momentum),
      gamma_(name + ".gamma", {channels}), beta_(name + ".beta", {channels}),
      running_mean_({channels}), running_var_({channels}), name_(std::move(name)) {
    gamma_.value.fill(1.0f);
    running_var_.fill(1.0f);
}

Tensor BatchNorm2d::forward(const Tensor& x, bool train) {
    unbatched_ = x.rank() == 3;
    Tensor xb = unbatched_
        ? Tensor({1, x.dim(0), x.dim(1), x.dim(2)},
                 std::vector<float>(x.data(), x.data() + x.numel()))
        : x;
    const int n = xb.dim(0), c = xb.dim(1), h = xb.dim(2), w = xb.dim(3);
    if (c != channels_) throw std::runtime_error("batchnorm channel mismatch");
    const int64_t plane = static_cast<int64_t>(h) * w;
    const double count = static_cast<double>(n) * plane;

    xhat_ = Tensor({n, c, h, w});
    inv_std_.assign(static_cast<size_t>(c), 0.0f);
    trained_forward_ = train;
    Tensor out({n, c, h, w});

    for (int ci = 0; ci < c; ++ci) {
        double mean, var;
        if (train) {
            double s = 0.0, s2 = 0.0;
            for (int ni = 0; ni < n; ++ni) {
                const float* p = xb.data() + (static_cast<int64_t>(ni) * c + ci) * plane;
                for (int64_t i = 0; i < plane; ++i) {
                    s += p[i];
                    s2 += static_cast<double>(p[i]) * p[i];
                }
            }
            mean = s / count;
            var = s2 / count - mean * mean;
            if (var < 0) var = 0;
            running_mean_[ci] = (1.0f - momentum_) * running_mean_[ci] + momentum_ * static_cast<float>(mean);
            running_var_[ci] = (1.0f - momentum_) * running_var_[ci] + momentum_ * static_cast<float>(var);
        } else {
            mean = running_mean_[ci];
            var = running_var_[ci];
        }
        const float istd = 1.0f / std::sqrt(static_cast<float>(var) + eps_);
        inv_std_[static_cast<size_t>(ci)] = istd;
        const float g = gamma_.value[ci], b = beta_.value[ci], m = static_cast<float>(mean);
        for (int ni = 0; ni < n; ++ni) {
            const float* p = xb.data() + (static_cast<int64_t>(ni) * c + ci) * plane;
            float* ph = xhat_.data() + (static_cast<int64_t>(ni) * c + ci) * plane;
            float* po = out.data() + (static_cast<int64_t>(ni) * c + ci) * plane;
            for (int64_t i = 0; i < plane; ++i) {
                ph[i] = (p[i] - m) * istd;
                po[i] = g * ph[i] + b;
            }
        }
    }
    if (unbatched_)
        return Tensor({c, h, w}, std::vector<float>(out.data(), out.data() + out.numel()));
    return out;
}

Tensor BatchNorm2d::backward(const Tensor& grad_out, bool accumulate_param_grads) {
    Tensor gy = grad_out.rank() == 3
        ? Tensor({1, grad_out.dim(0), grad_out.dim(1), grad_out.dim(2)},
                 std::vector<float>(grad_out.data(), grad_out.data() + grad_out.numel()))
        : grad_out;
    const int n = xhat_.dim(0), c = xhat_.dim(1), h = xhat_.dim(2), w = xhat_.dim(3);
    const int64_t plane = static_cast<int64_t>(h) * w;
    const double count = static_cast<double>(n) * plane;
    Tensor dx({n, c, h, w});

    for (int ci = 0; ci < c; ++ci) {
        double sum_dy = 0.0, sum_dy_xhat = 0.0;
        for (int ni = 0; ni < n; ++ni) {
            const float* pg = gy.data() + (static_cast<int64_t>(ni) * c + ci) * plane;
            const float* ph = xhat_.data() + (static_cast<int64_t>(ni) * c + ci) * plane;
            for (int64_t i = 0; i < plane; ++i) {
                sum_dy += pg[i];
                sum_dy_xhat += static_cast<double>(pg[i]) * ph[i];
            }
        }
        if (accumulate_param_grads && !gamma_.frozen) {
            gamma_.grad[ci] += static_cast<float>(sum_dy_xhat);
            beta_.grad[ci] += static_cast<float>(sum_dy);
        }
        const float g = gamma_.value[ci], istd = inv_std_[static_cast<size_t>(ci)];
        if (trained_forward_) {
            const float mean_dy = static_cast<float>(sum_dy / count);
            const float mean_dy_xhat = static_cast<float>(sum_dy_xhat / count);
            for (int ni = 0; ni < n; ++ni) {
                const float* pg = gy.data() + (static_cast<int64_t>(ni) * c + ci) * plane;
                const float* ph = xhat_.data() + (static_cast<int64_t>(ni) * c + ci) * plane;
                float* pd = dx.data() + (static_cast<int64_t>(ni) * c + ci) * plane;
                for (int64_t i = 0; i < plane; ++i)
                    pd[i] = g * istd * (pg[i] - mean_dy - ph[i] * mean_dy_xhat);
            }
        } else {
            for (int ni = 0; ni < n; ++ni) {
                const float* pg = gy.data() + (static_cast<int64_t>(ni) * c + ci) * plane;
                float* pd = dx.data() + (static_cast<int64_t>(ni) * c + ci) * plane;
                for (int64_t i = 0; i < plane; ++i) pd[i] = g * istd * pg[i];
            }
        }
    }
    if (unbatched_)
        return Tensor({c, h, w}, std::vector<float>(dx.data(), dx.data() + dx.numel()));
    return dx;
}

void BatchNorm2d::collect_params(std::vector<Param*>& out) {
    out.push_back(&gamma_);
    out.push_back(&beta_);
}

void BatchNorm2d::collect_buffers(std::vector<BufferRef>& out) {
    out.emplace_back(name_ + ".running_mean", &running_mean_);
    out.emplace_back(name_ + ".running_var", &running_var_);
}

}  // namespace retarget::nn
