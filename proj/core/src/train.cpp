#include "mriboost/train.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <numeric>
#include <sstream>

#include "mriboost/errors.hpp"
#include "mriboost/nn/weights_io.hpp"

namespace mriboost {

void validate(const TrainConfig& cfg) {
  if (!(cfg.lambda_cycle > 0.0)) throw ConfigError("lambda_cycle must be positive");
  if (cfg.epochs < 0) throw ConfigError("epochs must be nonnegative");
  if (cfg.batch_size < 1) throw ConfigError("batch_size must be >= 1");
  if (cfg.r_choices.empty()) throw ConfigError("r_choices must be nonempty");
  for (double r : cfg.r_choices)
    if (!(r >= 1.0)) throw ConfigError("acceleration factors must be >= 1");
  validate(cfg.degradation);
  validate(cfg.motion);
  nn::validate(cfg.generator);
  nn::validate(cfg.discriminator);
}

double max_train_r(const TrainConfig& cfg) {
  return *std::max_element(cfg.r_choices.begin(), cfg.r_choices.end());
}

std::string TrainLog::to_csv() const {
  std::ostringstream os;
  os << "step,epoch,cycle,g_adv,d_loss\n";
  os.precision(10);
  for (const auto& r : rows)
    os << r.step << "," << r.epoch << "," << r.cycle << "," << r.g_adv << "," << r.d_loss
       << "\n";
  return os.str();
}

RealGrid forward_degrade_mask(const RealGrid& x, const TrainConfig& cfg, Rng rng) {
  auto op = PhysicsOp<float>::sample(cfg.degradation, cfg.r_choices, cfg.acs_fraction,
                                     x.height, x.width, rng);
  return tensor_to_grid(op.forward(grid_to_tensor<float>(x)));
}

namespace {

using Tf = nn::Tensor4<float>;

void check_finite(float v, const char* what) {
  if (!std::isfinite(v)) throw DivergenceError(std::string("non-finite ") + what);
}

}  // namespace

StepLosses train_step(nn::Generator<float>& gen, nn::Discriminator<float>& disc,
                      const std::vector<RealGrid>& x_batch,
                      const std::vector<RealGrid>& z_batch, const TrainConfig& cfg,
                      Rng rng, nn::Adam<float>& g_state, nn::Adam<float>& d_state,
                      int epoch) {
  if (x_batch.empty() || z_batch.empty()) throw ConfigError("empty training batch");
  const size_t bs = x_batch.size();
  StepLosses losses;
  const float inv_bs = 1.0f / static_cast<float>(bs);

  // --- generator update ---
  gen.zero_grad();
  std::vector<Tf> fakes;  // detached G(z) for the discriminator update
  fakes.reserve(bs);
  for (size_t b = 0; b < bs; ++b) {
    Rng item_rng = rng.substream(b);
    const Tf x = grid_to_tensor<float>(x_batch[b]);
    const Tf z = grid_to_tensor<float>(z_batch[b % z_batch.size()]);

    // branch 1: x -> A x -> G -> compare to x
    auto op_a = PhysicsOp<float>::sample(cfg.degradation, cfg.r_choices, cfg.acs_fraction,
                                         x.h, x.w, item_rng.substream(0));
    const Tf ax = op_a.forward(x);
    const Tf gax = gen.forward(ax);
    Tf g1;
    const float l1a = l1_loss(gax, x, &g1);
    for (float& v : g1.v) v *= static_cast<float>(cfg.lambda_cycle) * inv_bs;
    gen.backward(g1);

    // branch 2: z -> G -> B G(z) -> compare to z, plus the adversarial term
    auto op_b = PhysicsOp<float>::sample(cfg.degradation, cfg.r_choices, cfg.acs_fraction,
                                         z.h, z.w, item_rng.substream(1));
    const Tf gz = gen.forward(z);
    fakes.push_back(gz);
    const Tf bgz = op_b.forward(gz);
    Tf g2;
    const float l1b = l1_loss(bgz, z, &g2);
    Tf gout = op_b.adjoint(g2);
    for (float& v : gout.v) v *= static_cast<float>(cfg.lambda_cycle) * inv_bs;

    const Tf score = disc.forward(gz);
    Tf gscore = Tf::like(score);
    float adv = 0.0f;
    const float inv_patches = 1.0f / static_cast<float>(score.size());
    for (size_t i = 0; i < score.size(); ++i) {
      const float d = score.v[i] - 1.0f;
      adv += d * d * inv_patches;
      gscore.v[i] = 2.0f * d * inv_patches * inv_bs;
    }
    const Tf g_adv_in = disc.backward(gscore);  // discriminator weights are
    disc.zero_grad();                            // not updated on this pass
    for (size_t i = 0; i < gout.size(); ++i) gout.v[i] += g_adv_in.v[i];
    gen.backward(gout);

    losses.cycle += (l1a + l1b) * inv_bs;
    losses.g_adv += adv * inv_bs;
  }
  check_finite(static_cast<float>(losses.cycle + losses.g_adv), "generator loss");
  auto g_params = gen.params();
  g_state.step(g_params, epoch);

  // --- discriminator update, fake held fixed ---
  disc.zero_grad();
  for (size_t b = 0; b < bs; ++b) {
    const Tf x = grid_to_tensor<float>(x_batch[b]);
    const Tf sr = disc.forward(x);
    Tf gr = Tf::like(sr);
    float dr = 0.0f;
    const float invp = 1.0f / static_cast<float>(sr.size());
    for (size_t i = 0; i < sr.size(); ++i) {
      const float d = sr.v[i] - 1.0f;
      dr += d * d * invp;
      gr.v[i] = 2.0f * d * invp * inv_bs;
    }
    disc.backward(gr);

    const Tf sf = disc.forward(fakes[b]);
    Tf gf = Tf::like(sf);
    float df = 0.0f;
    for (size_t i = 0; i < sf.size(); ++i) {
      df += sf.v[i] * sf.v[i] * invp;
      gf.v[i] = 2.0f * sf.v[i] * invp * inv_bs;
    }
    disc.backward(gf);
    losses.d_loss += (dr + df) * inv_bs;
  }
  check_finite(static_cast<float>(losses.d_loss), "discriminator loss");
  auto d_params = disc.params();
  d_state.step(d_params, epoch);
  return losses;
}

TrainResult train(const std::vector<RealGrid>& clean, const std::vector<RealGrid>& artifact,
                  const TrainConfig& cfg, const std::string& run_dir) {
  validate(cfg);
  if (clean.empty() || artifact.empty())
    throw DataError(DataFault::shape_mismatch, "training datasets must be nonempty");
  const int h = clean[0].height, w = clean[0].width;
  for (const auto& g : clean)
    if (g.height != h || g.width != w)
      throw DataError(DataFault::shape_mismatch, "clean grids differ in size");
  for (const auto& g : artifact)
    if (g.height != h || g.width != w)
      throw DataError(DataFault::shape_mismatch, "artifact grids differ in size");

  const auto t0 = std::chrono::steady_clock::now();
  const Rng root(cfg.seed);

  TrainResult result;
  result.generator.init(cfg.generator, root.substream(1));
  result.discriminator.init(cfg.discriminator, root.substream(2));

  // per-slice std normalization
  std::vector<RealGrid> xs, zs;
  xs.reserve(clean.size());
  zs.reserve(artifact.size());
  for (const auto& g : clean) xs.push_back(normalize_by_std(g).first);
  for (const auto& g : artifact) zs.push_back(normalize_by_std(g).first);

  nn::Adam<float> g_state, d_state;
  g_state.lr = d_state.lr = cfg.lr;
  g_state.decay_epoch = d_state.decay_epoch = cfg.lr_decay_epoch;

  const nlohmann::json extra = {{"max_train_R", max_train_r(cfg)}};
  if (!run_dir.empty()) std::filesystem::create_directories(run_dir);

  long step = 0;
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    Rng shuffle_rng = root.substream(1000 + static_cast<std::uint64_t>(epoch));
    std::vector<size_t> xi(xs.size()), zi(zs.size());
    std::iota(xi.begin(), xi.end(), 0);
    std::iota(zi.begin(), zi.end(), 0);
    for (size_t i = xi.size(); i > 1; --i)
      std::swap(xi[i - 1], xi[shuffle_rng.uniform_int(0, static_cast<std::int64_t>(i) - 1)]);
    for (size_t i = zi.size(); i > 1; --i)
      std::swap(zi[i - 1], zi[shuffle_rng.uniform_int(0, static_cast<std::int64_t>(i) - 1)]);

    const size_t steps_per_epoch =
        (xs.size() + cfg.batch_size - 1) / static_cast<size_t>(cfg.batch_size);
    double cycle_sum = 0.0;
    for (size_t s = 0; s < steps_per_epoch; ++s) {
      std::vector<RealGrid> xb, zb;
      for (int b = 0; b < cfg.batch_size; ++b) {
        xb.push_back(xs[xi[(s * cfg.batch_size + b) % xs.size()]]);
        zb.push_back(zs[zi[(s * cfg.batch_size + b) % zs.size()]]);
      }
      Rng step_rng = root.substream(2000).substream(static_cast<std::uint64_t>(step));
      StepLosses l;
      try {
        l = train_step(result.generator, result.discriminator, xb, zb, cfg, step_rng,
                       g_state, d_state, epoch);
      } catch (const DivergenceError&) {
        // last good checkpoint stays on disk
        throw;
      }
      result.log.rows.push_back({epoch, step, l.cycle, l.g_adv, l.d_loss});
      cycle_sum += l.cycle;
      ++step;
    }
    result.log.epoch_cycle_mean.push_back(cycle_sum / static_cast<double>(steps_per_epoch));

    if (!run_dir.empty()) {
      char name[64];
      std::snprintf(name, sizeof(name), "/ckpt_epoch_%03d.wts", epoch);
      nn::save_generator(result.generator, run_dir + name, extra);
      nn::save_generator(result.generator, run_dir + "/generator.wts", extra);
      nn::save_discriminator(result.discriminator, run_dir + "/discriminator.wts");
    }
  }

  result.log.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (!run_dir.empty() && cfg.epochs == 0)
    nn::save_generator(result.generator, run_dir + "/generator.wts", extra);
  return result;
}

}  // namespace mriboost
