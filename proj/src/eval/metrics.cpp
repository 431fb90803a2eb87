#include "retarget/eval/metrics.hpp"

#include <array>
#include <cmath>

#include "retarget/core/error.hpp"

namespace retarget::eval {

namespace {

void check_pair(const Tensor& a, const Tensor& b) {
    if (!a.same_shape(b))
        throw ModuleError("evaluation",
                          "metric shape mismatch: " + a.shape_str() + " vs " + b.shape_str());
    if (a.rank() != 3) throw ModuleError("evaluation", "metrics expect [C,H,W] images");
}

std::array<double, 11> gaussian_kernel_11() {
    std::array<double, 11> k{};
    const double sigma = 1.5;
    double s = 0.0;
    for (int i = 0; i < 11; ++i) {
        const double d = i - 5;
        k[static_cast<size_t>(i)] = std::exp(-d * d / (2.0 * sigma * sigma));
        s += k[static_cast<size_t>(i)];
    }
    for (double& v : k) v /= s;
    return k;
}

}  // namespace

double psnr(const Tensor& a, const Tensor& b) {
    check_pair(a, b);
    double mse = 0.0;
    for (int64_t i = 0; i < a.numel(); ++i) {
        const double d = static_cast<double>(a[i]) - b[i];
        mse += d * d;
    }
    mse /= static_cast<double>(a.numel());
    if (mse <= 0.0) return kPsnrCap;
    return std::min(kPsnrCap, 10.0 * std::log10(1.0 / mse));
}

double ssim(const Tensor& a, const Tensor& b) {
    check_pair(a, b);
    const int c = a.dim(0), h = a.dim(1), w = a.dim(2);
    constexpr int win = 11;
    if (h < win || w < win)
        throw ModuleError("evaluation", "ssim needs images of at least 11x11");
    const auto k = gaussian_kernel_11();
    const double c1 = 0.01 * 0.01, c2 = 0.03 * 0.03;

    double total = 0.0;
    int64_t count = 0;
    for (int ci = 0; ci < c; ++ci)
        for (int y = 0; y + win <= h; ++y)
            for (int x = 0; x + win <= w; ++x) {
                double ma = 0, mb = 0, saa = 0, sbb = 0, sab = 0;
                for (int dy = 0; dy < win; ++dy)
                    for (int dx = 0; dx < win; ++dx) {
                        const double wgt = k[static_cast<size_t>(dy)] * k[static_cast<size_t>(dx)];
                        const double va = a.at(ci, y + dy, x + dx);
                        const double vb = b.at(ci, y + dy, x + dx);
                        ma += wgt * va;
                        mb += wgt * vb;
                        saa += wgt * va * va;
                        sbb += wgt * vb * vb;
                        sab += wgt * va * vb;
                    }
                const double var_a = saa - ma * ma;
                const double var_b = sbb - mb * mb;
                const double cov = sab - ma * mb;
                total += ((2 * ma * mb + c1) * (2 * cov + c2)) /
                         ((ma * ma + mb * mb + c1) * (var_a + var_b + c2));
                ++count;
            }
    return total / static_cast<double>(count);
}

FullReference full_reference(const Tensor& a, const Tensor& b) {
    return FullReference{psnr(a, b), ssim(a, b)};
}

}  // namespace retarget::eval
