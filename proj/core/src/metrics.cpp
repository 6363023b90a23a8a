#include "mriboost/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "mriboost/errors.hpp"

namespace mriboost {

namespace {

void check_pair(const RealGrid& ref, const RealGrid& test) {
  if (ref.height != test.height || ref.width != test.width)
    throw DataError(DataFault::shape_mismatch, "metric inputs differ in shape");
  for (float v : ref.data)
    if (!std::isfinite(v)) throw DataError(DataFault::non_finite, "non-finite reference");
  for (float v : test.data)
    if (!std::isfinite(v)) throw DataError(DataFault::non_finite, "non-finite test image");
}

}  // namespace

double psnr(const RealGrid& ref, const RealGrid& test) {
  check_pair(ref, test);
  double mse = 0.0;
  float peak = ref.data.empty() ? 0.0f : ref.data[0];
  for (size_t i = 0; i < ref.size(); ++i) {
    const double d = static_cast<double>(ref.data[i]) - test.data[i];
    mse += d * d;
    peak = std::max(peak, ref.data[i]);
  }
  mse /= static_cast<double>(ref.size());
  if (mse == 0.0) return kPsnrCap;
  return 10.0 * std::log10(static_cast<double>(peak) * peak / mse);
}

double ssim(const RealGrid& ref, const RealGrid& test) {
  check_pair(ref, test);
  constexpr int kWin = 11;
  constexpr double kSigma = 1.5, kK1 = 0.01, kK2 = 0.03;
  if (ref.height < kWin || ref.width < kWin)
    throw DataError(DataFault::shape_mismatch, "image smaller than SSIM window");

  float lo = ref.data[0], hi = ref.data[0];
  for (float v : ref.data) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  const double range = static_cast<double>(hi) - lo;
  if (range <= 0.0)
    throw DataError(DataFault::non_finite, "zero dynamic range in SSIM reference");
  const double c1 = (kK1 * range) * (kK1 * range);
  const double c2 = (kK2 * range) * (kK2 * range);

  double win[kWin][kWin];
  double wsum = 0.0;
  for (int i = 0; i < kWin; ++i)
    for (int j = 0; j < kWin; ++j) {
      const double di = i - kWin / 2, dj = j - kWin / 2;
      win[i][j] = std::exp(-(di * di + dj * dj) / (2.0 * kSigma * kSigma));
      wsum += win[i][j];
    }
  for (auto& row : win)
    for (double& v : row) v /= wsum;

  double acc = 0.0;
  long count = 0;
  for (int r = 0; r + kWin <= ref.height; ++r) {
    for (int c = 0; c + kWin <= ref.width; ++c) {
      double mx = 0, my = 0, sxx = 0, syy = 0, sxy = 0;
      for (int i = 0; i < kWin; ++i)
        for (int j = 0; j < kWin; ++j) {
          const double w = win[i][j];
          const double x = ref.at(r + i, c + j);
          const double y = test.at(r + i, c + j);
          mx += w * x;
          my += w * y;
          sxx += w * x * x;
          syy += w * y * y;
          sxy += w * x * y;
        }
      sxx -= mx * mx;
      syy -= my * my;
      sxy -= mx * my;
      const double num = (2.0 * mx * my + c1) * (2.0 * sxy + c2);
      const double den = (mx * mx + my * my + c1) * (sxx + syy + c2);
      acc += num / den;
      ++count;
    }
  }
  return acc / static_cast<double>(count);
}

}  // namespace mriboost
