#pragma once

#include <optional>
#include <vector>

#include "mriboost/grid.hpp"
#include "mriboost/rng.hpp"

namespace mriboost {

/// Blur/noise parameters of the degradation block. Kernel and noise means
/// are fixed at zero; only the spreads vary.
struct DegradationParams {
  double mu_k = 0.0;
  double sigma_k = 0.0;  // blur std, pixels
  double mu_n = 0.0;
  double sigma_n = 0.0;  // noise std, image-intensity units
};

struct DegradationConfig {
  double beta_a = 2.0;
  double beta_b = 2.0;
  std::optional<double> sigma_k_fixed;  // ablation mode: bypass Beta sampling
  double sigma_n = 0.01;
  bool enable_noise = true;
};

void validate(const DegradationConfig& cfg);

/// Draw blur/noise parameters: sigma_k ~ Beta(a,b) on (0,1) pixels, or the
/// fixed ablation value; sigma_n from the config (0 when noise disabled).
DegradationParams sample_psi(const DegradationConfig& cfg, Rng& rng);

/// Normalized symmetric taps over t in [-h, h], h = max(1, ceil(3*sigma)).
/// sigma below 1e-3 degenerates to the discrete delta [0, 1, 0].
std::vector<double> gaussian_kernel(double sigma_k);

/// Separable Gaussian blur with reflect boundaries plus white Gaussian
/// noise; deterministic in rng.
RealGrid degrade(const RealGrid& x, const DegradationParams& psi, Rng& rng);

/// Blur only (shared by degrade and its adjoint users).
std::vector<double> blur_separable(const std::vector<double>& img, int h, int w,
                                   const std::vector<double>& kernel);

/// Adjoint of blur_separable under the same reflect boundary handling.
std::vector<double> blur_separable_adjoint(const std::vector<double>& g, int h, int w,
                                           const std::vector<double>& kernel);

}  // namespace mriboost
