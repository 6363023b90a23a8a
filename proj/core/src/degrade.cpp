#include "mriboost/degrade.hpp"

#include <cmath>

#include "mriboost/errors.hpp"

namespace mriboost {

void validate(const DegradationConfig& cfg) {
  if (!(cfg.beta_a > 0.0 && cfg.beta_b > 0.0))
    throw ConfigError("Beta shape parameters must be positive");
  if (cfg.sigma_k_fixed && !(*cfg.sigma_k_fixed >= 0.0))
    throw ConfigError("fixed sigma_k must be nonnegative");
  if (!(cfg.sigma_n >= 0.0)) throw ConfigError("sigma_n must be nonnegative");
}

DegradationParams sample_psi(const DegradationConfig& cfg, Rng& rng) {
  validate(cfg);
  DegradationParams psi;
  psi.sigma_k = cfg.sigma_k_fixed ? *cfg.sigma_k_fixed : rng.beta(cfg.beta_a, cfg.beta_b);
  psi.sigma_n = cfg.enable_noise ? cfg.sigma_n : 0.0;
  return psi;
}

std::vector<double> gaussian_kernel(double sigma_k) {
  if (sigma_k < 1e-3) return {0.0, 1.0, 0.0};
  const int h = std::max(1, static_cast<int>(std::ceil(3.0 * sigma_k)));
  std::vector<double> taps(2 * h + 1);
  double sum = 0.0;
  for (int t = -h; t <= h; ++t) {
    const double v = std::exp(-static_cast<double>(t) * t / (2.0 * sigma_k * sigma_k));
    taps[t + h] = v;
    sum += v;
  }
  for (double& v : taps) v /= sum;
  return taps;
}

namespace {

// Symmetric reflection with the edge sample repeated: x[-1] -> x[0],
// x[n] -> x[n-1]. This extension makes a normalized symmetric kernel
// exactly mean-preserving (the folded column sums are 1).
inline int reflect(int i, int n) {
  while (i < 0 || i >= n) {
    if (i < 0) i = -i - 1;
    if (i >= n) i = 2 * n - 1 - i;
  }
  return i;
}

void pass_rows(const std::vector<double>& in, std::vector<double>& out, int h, int w,
               const std::vector<double>& k, bool adjoint) {
  const int half = static_cast<int>(k.size()) / 2;
  for (int r = 0; r < h; ++r) {
    const double* src = in.data() + static_cast<size_t>(r) * w;
    double* dst = out.data() + static_cast<size_t>(r) * w;
    for (int c = 0; c < w; ++c) {
      if (adjoint) {
        for (int t = -half; t <= half; ++t)
          dst[reflect(c + t, w)] += k[t + half] * src[c];
      } else {
        double acc = 0.0;
        for (int t = -half; t <= half; ++t) acc += k[t + half] * src[reflect(c + t, w)];
        dst[c] = acc;
      }
    }
  }
}

void pass_cols(const std::vector<double>& in, std::vector<double>& out, int h, int w,
               const std::vector<double>& k, bool adjoint) {
  const int half = static_cast<int>(k.size()) / 2;
  for (int c = 0; c < w; ++c) {
    for (int r = 0; r < h; ++r) {
      if (adjoint) {
        const double v = in[static_cast<size_t>(r) * w + c];
        for (int t = -half; t <= half; ++t)
          out[static_cast<size_t>(reflect(r + t, h)) * w + c] += k[t + half] * v;
      } else {
        double acc = 0.0;
        for (int t = -half; t <= half; ++t)
          acc += k[t + half] * in[static_cast<size_t>(reflect(r + t, h)) * w + c];
        out[static_cast<size_t>(r) * w + c] = acc;
      }
    }
  }
}

}  // namespace

std::vector<double> blur_separable(const std::vector<double>& img, int h, int w,
                                   const std::vector<double>& kernel) {
  std::vector<double> tmp(img.size(), 0.0), out(img.size(), 0.0);
  pass_rows(img, tmp, h, w, kernel, false);
  pass_cols(tmp, out, h, w, kernel, false);
  return out;
}

std::vector<double> blur_separable_adjoint(const std::vector<double>& g, int h, int w,
                                           const std::vector<double>& kernel) {
  std::vector<double> tmp(g.size(), 0.0), out(g.size(), 0.0);
  pass_cols(g, tmp, h, w, kernel, true);
  pass_rows(tmp, out, h, w, kernel, true);
  return out;
}

RealGrid degrade(const RealGrid& x, const DegradationParams& psi, Rng& rng) {
  std::vector<double> img(x.data.begin(), x.data.end());
  std::vector<double> blurred = blur_separable(img, x.height, x.width, gaussian_kernel(psi.sigma_k));
  RealGrid out(x.height, x.width);
  for (size_t i = 0; i < out.size(); ++i) {
    double v = blurred[i];
    if (psi.sigma_n > 0.0) v += rng.normal(psi.mu_n, psi.sigma_n);
    out.data[i] = static_cast<float>(v);
  }
  return out;
}

}  // namespace mriboost
