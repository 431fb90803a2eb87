#include "retarget/train/adam.hpp"

#include <cmath>

#include "retarget/core/error.hpp"

namespace retarget::train {

void Adam::attach(const std::vector<retarget::nn::Param*>& params) {
    m_.clear();
    v_.clear();
    m_.reserve(params.size());
    v_.reserve(params.size());
    for (const auto* p : params) {
        m_.emplace_back(Tensor::zeros(p->value.shape()));
        v_.emplace_back(Tensor::zeros(p->value.shape()));
    }
    t_ = 0;
}

void Adam::step(const std::vector<retarget::nn::Param*>& params) {
    if (params.size() != m_.size())
        throw ModuleError("trainer", "optimizer not attached to this parameter list");
    ++t_;
    const double bc1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
    const double bc2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
    for (size_t i = 0; i < params.size(); ++i) {
        retarget::nn::Param& p = *params[i];
        if (p.frozen) {
            p.zero_grad();
            continue;
        }
        Tensor& m = m_[i];
        Tensor& v = v_[i];
        const int64_t n = p.value.numel();
        for (int64_t j = 0; j < n; ++j) {
            const double g = p.grad[j];
            const double mj = beta1_ * m[j] + (1.0 - beta1_) * g;
            const double vj = beta2_ * v[j] + (1.0 - beta2_) * g * g;
            m[j] = static_cast<float>(mj);
            v[j] = static_cast<float>(vj);
            p.value[j] -= static_cast<float>(lr_ * (mj / bc1) / (std::sqrt(vj / bc2) + eps_));
        }
        p.zero_grad();
    }
}

}  // namespace retarget::train
