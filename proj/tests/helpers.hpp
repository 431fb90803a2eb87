#pragma once

#include <cmath>
#include <functional>
#include <vector>

#include "doctest.h"
#include "retarget/core/rng.hpp"
#include "retarget/core/tensor.hpp"

namespace testutil {

using retarget::Rng;
using retarget::Tensor;

inline Tensor rand_tensor(std::vector<int> shape, Rng& rng, float lo = -1.0f, float hi = 1.0f) {
    Tensor t(std::move(shape));
    for (int64_t i = 0; i < t.numel(); ++i) t[i] = retarget::uniform(rng, lo, hi);
    return t;
}

// Central finite difference of a scalar function w.r.t. one tensor, compared
// against the analytic gradient. Returns the fraction of coordinates whose
// relative error is within tol. `floor` keeps near-zero gradients from being
// judged purely on finite-difference noise.
inline double gradcheck_fraction(Tensor& x, const std::function<double()>& f,
                                 const Tensor& analytic, float eps = 1e-3f,
                                 double tol = 1e-3, double floor = 1e-4) {
    REQUIRE(analytic.numel() == x.numel());
    int64_t ok = 0;
    for (int64_t i = 0; i < x.numel(); ++i) {
        const float orig = x[i];
        x[i] = orig + eps;
        const double fp = f();
        x[i] = orig - eps;
        const double fm = f();
        x[i] = orig;
        const double fd = (fp - fm) / (2.0 * eps);
        const double an = analytic[i];
        const double denom = std::max({std::abs(fd), std::abs(an), floor});
        if (std::abs(fd - an) / denom <= tol) ++ok;
    }
    return static_cast<double>(ok) / static_cast<double>(std::max<int64_t>(1, x.numel()));
}

inline double max_abs_diff(const Tensor& a, const Tensor& b) {
    REQUIRE(a.numel() == b.numel());
    double m = 0.0;
    for (int64_t i = 0; i < a.numel(); ++i)
        m = std::max(m, std::abs(static_cast<double>(a[i]) - b[i]));
    return m;
}

}  // namespace testutil
