#include "mriboost/bootstrap.hpp"

#include <algorithm>
#include <cmath>

#include "mriboost/errors.hpp"
#include "mriboost/nn/weights_io.hpp"

namespace mriboost {

RealGrid WienerReconstructor::reconstruct(const RealGrid& img) {
  return oracle_wiener_recon(img, psi_, snr_);
}

namespace {

inline int reflect_idx(int i, int n) {
  if (n == 1) return 0;
  while (i < 0 || i >= n) {
    if (i < 0) i = -i;
    if (i >= n) i = 2 * n - 2 - i;
  }
  return i;
}

}  // namespace

RealGrid pad_reflect_to_multiple(const RealGrid& g, int multiple, int* pad_h, int* pad_w) {
  const int ph = (multiple - g.height % multiple) % multiple;
  const int pw = (multiple - g.width % multiple) % multiple;
  if (pad_h) *pad_h = ph;
  if (pad_w) *pad_w = pw;
  if (ph == 0 && pw == 0) return g;
  RealGrid out(g.height + ph, g.width + pw);
  for (int r = 0; r < out.height; ++r)
    for (int c = 0; c < out.width; ++c)
      out.at(r, c) = g.at(reflect_idx(r, g.height), reflect_idx(c, g.width));
  return out;
}

RealGrid crop(const RealGrid& g, int height, int width) {
  RealGrid out(height, width);
  for (int r = 0; r < height; ++r)
    for (int c = 0; c < width; ++c) out.at(r, c) = g.at(r, c);
  return out;
}

RealGrid GeneratorReconstructor::reconstruct(const RealGrid& img) {
  int ph = 0, pw = 0;
  const RealGrid padded = pad_reflect_to_multiple(img, 1 << g_.cfg.stages, &ph, &pw);
  nn::Tensor4<float> x(1, 1, padded.height, padded.width);
  std::copy(padded.data.begin(), padded.data.end(), x.v.begin());
  nn::Tensor4<float> y = g_.forward(x, /*train=*/false);
  RealGrid out(padded.height, padded.width);
  std::copy(y.v.begin(), y.v.end(), out.data.begin());
  return (ph || pw) ? crop(out, img.height, img.width) : out;
}

void validate(const InferenceConfig& cfg) {
  if (cfg.N < 1) throw ConfigError("bootstrap N must be >= 1");
  if (!(cfg.R >= 1.0)) throw ConfigError("acceleration factor must be >= 1");
  if (cfg.max_R && cfg.R > *cfg.max_R + 1e-9)
    throw ConfigError("inference R exceeds the training maximum");
  if (!cfg.weights.empty()) {
    if (static_cast<int>(cfg.weights.size()) != cfg.N)
      throw ConfigError("weights length must equal N");
    double sum = 0.0;
    for (double w : cfg.weights) {
      if (w < 0.0) throw ConfigError("bootstrap weights must be nonnegative");
      sum += w;
    }
    if (std::abs(sum - 1.0) > 1e-9) throw ConfigError("bootstrap weights must sum to 1");
  }
}

RealGrid bootstrap_reconstruct(const RealGrid& y_img, Reconstructor& recon,
                               const InferenceConfig& cfg, Rng rng) {
  validate(cfg);
  const KGrid k = fft2c(to_kgrid(y_img));
  RealGrid acc(y_img.height, y_img.width);
  std::vector<double> sum(acc.size(), 0.0);
  for (int n = 0; n < cfg.N; ++n) {
    Rng mask_rng = rng.substream(static_cast<std::uint64_t>(n));
    const Mask m = make_mask(y_img.width, cfg.R, cfg.acs_fraction, mask_rng);
    const RealGrid sub = zero_filled_recon(apply_mask(k, m));
    const RealGrid rec = recon.reconstruct(sub);
    const double w = cfg.weights.empty() ? 1.0 / cfg.N : cfg.weights[n];
    for (size_t i = 0; i < sum.size(); ++i) sum[i] += w * rec.data[i];
  }
  for (size_t i = 0; i < sum.size(); ++i) acc.data[i] = static_cast<float>(sum[i]);
  return acc;
}

namespace {

// Symmetric edge-repeat reflection, matching the blur boundary handling.
inline int reflect_sym(int i, int n) {
  const int period = 2 * n;
  int m = i % period;
  if (m < 0) m += period;
  return m < n ? m : period - 1 - m;
}

}  // namespace

RealGrid oracle_wiener_recon(const RealGrid& input, const DegradationParams& psi,
                             double snr_param) {
  const std::vector<double> taps = gaussian_kernel(psi.sigma_k);
  const int half = static_cast<int>(taps.size()) / 2;

  // Pad with the blur's own boundary extension so the frequency-domain
  // (circular) deconvolution model matches away from the original borders.
  const int pad = std::max(8, 4 * half);
  const int H = input.height + 2 * pad, W = input.width + 2 * pad;
  RealGrid y_img(H, W);
  for (int r = 0; r < H; ++r)
    for (int c = 0; c < W; ++c)
      y_img.at(r, c) =
          input.at(reflect_sym(r - pad, input.height), reflect_sym(c - pad, input.width));

  // 1D DTFT of the symmetric kernel, evaluated on the centered grid.
  auto transfer = [&](int i, int n) {
    const double kappa = 2.0 * M_PI * (i - n / 2) / static_cast<double>(n);
    double re = taps[half];
    for (int t = 1; t <= half; ++t) re += 2.0 * taps[half + t] * std::cos(kappa * t);
    return re;
  };
  std::vector<double> hx(H), hy(W);
  for (int i = 0; i < H; ++i) hx[i] = transfer(i, H);
  for (int i = 0; i < W; ++i) hy[i] = transfer(i, W);

  KGrid k = fft2c(to_kgrid(y_img));
  const double inv_snr = snr_param > 0 ? 1.0 / snr_param : 0.0;
  for (int r = 0; r < H; ++r)
    for (int c = 0; c < W; ++c) {
      const double h = hx[r] * hy[c];
      k.at(r, c) *= h / (h * h + inv_snr);
    }
  const RealGrid restored = magnitude(ifft2c(k));
  RealGrid out(input.height, input.width);
  for (int r = 0; r < out.height; ++r)
    for (int c = 0; c < out.width; ++c) out.at(r, c) = restored.at(r + pad, c + pad);
  return out;
}

RealGrid enhance_image(const RealGrid& input, const std::string& weights_path,
                       const InferenceConfig& cfg) {
  nlohmann::json wcfg;
  nn::Generator<float> g = nn::load_generator<float>(weights_path, &wcfg);
  InferenceConfig local = cfg;
  if (!local.max_R && wcfg.contains("max_train_R"))
    local.max_R = wcfg["max_train_R"].get<double>();
  validate(local);

  auto [normalized, scale] = normalize_by_std(input);
  GeneratorReconstructor recon(std::move(g));
  RealGrid out = bootstrap_reconstruct(normalized, recon, local, Rng(cfg.mask_seed));
  // Rescale and clamp: the estimate is a magnitude image, so negative
  // excursions of the linear output head are truncated at zero.
  for (float& v : out.data) v = std::max(0.0f, static_cast<float>(v * scale));
  return out;
}

}  // namespace mriboost
