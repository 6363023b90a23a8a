#pragma once

#include <string>
#include <vector>

#include "mriboost/bootstrap.hpp"
#include "mriboost/degrade.hpp"
#include "mriboost/kspace.hpp"
#include "mriboost/nn/adam.hpp"
#include "mriboost/nn/discriminator.hpp"
#include "mriboost/nn/generator.hpp"

namespace mriboost {

struct TrainConfig {
  double lambda_cycle = 0.001;
  int epochs = 150;
  double lr = 1e-4;
  int lr_decay_epoch = 100;
  int batch_size = 1;
  std::vector<double> r_choices = {3.0, 4.0};  // drawn per update step
  double acs_fraction = 0.06;
  DegradationConfig degradation;
  MotionSpec motion;  // used only to synthesize domain-Z data in simulation mode
  std::uint64_t seed = 0;
  nn::GeneratorConfig generator;
  nn::DiscriminatorConfig discriminator;
};

void validate(const TrainConfig& cfg);

double max_train_r(const TrainConfig& cfg);

struct StepLosses {
  double cycle = 0.0;
  double g_adv = 0.0;
  double d_loss = 0.0;
};

struct TrainLog {
  struct Row {
    int epoch;
    long step;
    double cycle, g_adv, d_loss;
  };
  std::vector<Row> rows;
  std::vector<double> epoch_cycle_mean;
  double wall_seconds = 0.0;

  std::string to_csv() const;
};

/// One sampled realization of the training forward operator
/// F^{-1} T F L_psi, differentiable through every stage. The blur kernel,
/// noise field and mask are frozen at construction so forward and adjoint
/// describe the same linear(ized) map.
template <typename T>
struct PhysicsOp {
  std::vector<double> kernel;
  std::vector<double> noise;  // additive, image domain
  Mask mask;
  int h = 0, w = 0;
  KGrid recon_cache;  // complex image after the masked inverse transform

  static PhysicsOp sample(const DegradationConfig& deg, const std::vector<double>& r_choices,
                          double acs_fraction, int h, int w, Rng rng) {
    PhysicsOp op;
    op.h = h;
    op.w = w;
    Rng psi_rng = rng.substream(0);
    Rng noise_rng = rng.substream(1);
    Rng mask_rng = rng.substream(2);
    Rng pick_rng = rng.substream(3);
    const DegradationParams psi = sample_psi(deg, psi_rng);
    op.kernel = gaussian_kernel(psi.sigma_k);
    op.noise.assign(static_cast<size_t>(h) * w, 0.0);
    if (psi.sigma_n > 0.0)
      for (double& v : op.noise) v = noise_rng.normal(psi.mu_n, psi.sigma_n);
    const double r =
        r_choices[static_cast<size_t>(pick_rng.uniform_int(0, static_cast<int>(r_choices.size()) - 1))];
    op.mask = make_mask(w, r, acs_fraction, mask_rng);
    return op;
  }

  /// Identity operator (delta kernel, no noise, full mask).
  static PhysicsOp identity(int h, int w) {
    PhysicsOp op;
    op.h = h;
    op.w = w;
    op.kernel = gaussian_kernel(0.0);
    op.noise.assign(static_cast<size_t>(h) * w, 0.0);
    op.mask.width = w;
    op.mask.R = 1.0;
    op.mask.acs_count = 1;
    op.mask.selected.assign(w, 1);
    return op;
  }

  nn::Tensor4<T> forward(const nn::Tensor4<T>& x) {
    std::vector<double> img(x.size());
    for (size_t i = 0; i < img.size(); ++i) img[i] = static_cast<double>(x.v[i]);
    std::vector<double> low = blur_separable(img, h, w, kernel);
    for (size_t i = 0; i < low.size(); ++i) low[i] += noise[i];
    KGrid kg(h, w);
    for (size_t i = 0; i < low.size(); ++i) kg.data[i] = {low[i], 0.0};
    recon_cache = ifft2c(apply_mask(fft2c(kg), mask));
    nn::Tensor4<T> out(x.n, x.c, h, w);
    for (size_t i = 0; i < out.size(); ++i)
      out.v[i] = static_cast<T>(std::abs(recon_cache.data[i]));
    return out;
  }

  /// J^T g for the forward map above (magnitude treated as 0-gradient at
  /// exact zeros).
  nn::Tensor4<T> adjoint(const nn::Tensor4<T>& g) {
    KGrid gw(h, w);
    for (size_t i = 0; i < gw.size(); ++i) {
      const double mag = std::abs(recon_cache.data[i]);
      gw.data[i] = mag > 1e-30
                       ? static_cast<double>(g.v[i]) * recon_cache.data[i] / mag
                       : std::complex<double>(0.0, 0.0);
    }
    const KGrid gu = ifft2c(apply_mask(fft2c(gw), mask));
    std::vector<double> gimg(gu.size());
    for (size_t i = 0; i < gimg.size(); ++i) gimg[i] = gu.data[i].real();
    std::vector<double> gx = blur_separable_adjoint(gimg, h, w, kernel);
    nn::Tensor4<T> out(1, 1, h, w);
    for (size_t i = 0; i < out.size(); ++i) out.v[i] = static_cast<T>(gx[i]);
    return out;
  }
};

template <typename T>
nn::Tensor4<T> grid_to_tensor(const RealGrid& g) {
  nn::Tensor4<T> t(1, 1, g.height, g.width);
  for (size_t i = 0; i < g.size(); ++i) t.v[i] = static_cast<T>(g.data[i]);
  return t;
}

template <typename T>
RealGrid tensor_to_grid(const nn::Tensor4<T>& t) {
  RealGrid g(t.h, t.w);
  for (size_t i = 0; i < g.size(); ++i) g.data[i] = static_cast<float>(t.v[i]);
  return g;
}

/// Sample-and-apply helper: fresh psi and mask per call.
RealGrid forward_degrade_mask(const RealGrid& x, const TrainConfig& cfg, Rng rng);

/// Mean absolute error and its gradient w.r.t. `a`.
template <typename T>
T l1_loss(const nn::Tensor4<T>& a, const nn::Tensor4<T>& b, nn::Tensor4<T>* ga = nullptr) {
  T acc = T(0);
  if (ga) *ga = nn::Tensor4<T>::like(a);
  const T inv = T(1) / static_cast<T>(a.size());
  for (size_t i = 0; i < a.size(); ++i) {
    const T d = a.v[i] - b.v[i];
    acc += d < T(0) ? -d : d;
    if (ga) ga->v[i] = (d > T(0) ? inv : (d < T(0) ? -inv : T(0)));
  }
  return acc * inv;
}

/// Cycle consistency: |x - G(A x)|_1 + |z - B G(z)|_1 with
/// independently sampled physics operators A and B. Evaluation-only.
template <typename T>
T cycle_loss(nn::Generator<T>& gen, const nn::Tensor4<T>& x, const nn::Tensor4<T>& z,
             const TrainConfig& cfg, Rng rng) {
  auto op_a = PhysicsOp<T>::sample(cfg.degradation, cfg.r_choices, cfg.acs_fraction, x.h,
                                   x.w, rng.substream(0));
  auto op_b = PhysicsOp<T>::sample(cfg.degradation, cfg.r_choices, cfg.acs_fraction, z.h,
                                   z.w, rng.substream(1));
  const nn::Tensor4<T> gx = gen.forward(op_a.forward(x), false);
  const nn::Tensor4<T> gz = gen.forward(z, false);
  return l1_loss(gx, x) + l1_loss(op_b.forward(gz), z);
}

/// LSGAN losses with real target 1 and fake target 0, means over all patch
/// scores. Evaluation-only; the fake batch is treated as detached for d_loss.
template <typename T>
std::pair<T, T> lsgan_losses(nn::Discriminator<T>& disc,
                             const std::vector<nn::Tensor4<T>>& real,
                             const std::vector<nn::Tensor4<T>>& fake) {
  T d_loss = T(0), g_loss = T(0);
  for (const auto& r : real) {
    const auto s = disc.forward(r, false);
    T acc = T(0);
    for (T v : s.v) acc += (v - T(1)) * (v - T(1));
    d_loss += acc / static_cast<T>(s.size());
  }
  if (!real.empty()) d_loss /= static_cast<T>(real.size());
  T d_fake = T(0);
  for (const auto& f : fake) {
    const auto s = disc.forward(f, false);
    T accd = T(0), accg = T(0);
    for (T v : s.v) {
      accd += v * v;
      accg += (v - T(1)) * (v - T(1));
    }
    d_fake += accd / static_cast<T>(s.size());
    g_loss += accg / static_cast<T>(s.size());
  }
  if (!fake.empty()) {
    d_fake /= static_cast<T>(fake.size());
    g_loss /= static_cast<T>(fake.size());
  }
  return {d_loss + d_fake, g_loss};
}

/// One alternating update: generator first (lambda * cycle + g_adv), then
/// the discriminator with the fake held fixed.
StepLosses train_step(nn::Generator<float>& gen, nn::Discriminator<float>& disc,
                      const std::vector<RealGrid>& x_batch,
                      const std::vector<RealGrid>& z_batch, const TrainConfig& cfg,
                      Rng rng, nn::Adam<float>& g_state, nn::Adam<float>& d_state,
                      int epoch);

struct TrainResult {
  nn::Generator<float> generator;
  nn::Discriminator<float> discriminator;
  TrainLog log;
};

/// Full unpaired training run. Grids are normalized per-slice; checkpoints
/// are written to run_dir at every epoch end (empty run_dir disables them).
TrainResult train(const std::vector<RealGrid>& clean, const std::vector<RealGrid>& artifact,
                  const TrainConfig& cfg, const std::string& run_dir = "");

}  // namespace mriboost
