#pragma once

#include "retarget/core/tensor.hpp"

namespace retarget::eval {

using retarget::Tensor;

inline constexpr double kPsnrCap = 99.0;  // sentinel for identical images

struct FullReference {
    double psnr = 0.0;  // dB, capped at kPsnrCap
    double ssim = 0.0;
};

double psnr(const Tensor& a, const Tensor& b);

// Structural similarity with an 11x11 Gaussian window (sigma 1.5), k1=0.01,
// k2=0.03, dynamic range 1. Windows are evaluated fully inside the image and
// the score is averaged over channels.
double ssim(const Tensor& a, const Tensor& b);

FullReference full_reference(const Tensor& a, const Tensor& b);

}  // namespace retarget::eval
