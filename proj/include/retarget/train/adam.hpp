#pragma once

#include <vector>

#include "retarget/core/tensor.hpp"
#include "retarget/nn/layer.hpp"

namespace retarget::train {

using retarget::Tensor;

// Plain Adam; moment slots are parallel to the attached parameter list.
class Adam {
public:
    explicit Adam(double lr, double beta1 = 0.9, double beta2 = 0.999, double eps = 1e-8)
        : lr_(lr), beta1_(beta1), beta2_(beta2), eps_(eps) {}

    void attach(const std::vector<retarget::nn::Param*>& params);
    // One update from the accumulated gradients; frozen params are skipped.
    // Gradients are zeroed afterwards.
    void step(const std::vector<retarget::nn::Param*>& params);

    int64_t t() const { return t_; }
    void set_t(int64_t t) { t_ = t; }
    std::vector<Tensor>& first_moments() { return m_; }
    std::vector<Tensor>& second_moments() { return v_; }

private:
    double lr_, beta1_, beta2_, eps_;
    int64_t t_ = 0;
    std::vector<Tensor> m_, v_;
};

}  // namespace retarget::train
