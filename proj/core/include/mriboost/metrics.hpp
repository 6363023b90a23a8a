#pragma once

#include "mriboost/grid.hpp"

namespace mriboost {

/// 10*log10(peak^2 / MSE) with peak = max(ref); identical images report the
/// 99 dB cap.
double psnr(const RealGrid& ref, const RealGrid& test);

/// Mean local SSIM, 11x11 Gaussian window (sigma 1.5), K1=0.01, K2=0.03,
/// dynamic range L = max(ref) - min(ref).
double ssim(const RealGrid& ref, const RealGrid& test);

constexpr double kPsnrCap = 99.0;

}  // namespace mriboost
