#pragma once

#include <vector>

#include "mriboost/errors.hpp"
#include "mriboost/nn/layers.hpp"

namespace mriboost::nn {

struct DiscriminatorConfig {
  int blocks = 3;
  int base_channels = 64;
  double leaky_slope = 0.2;
  bool spectral_norm = true;
  int power_iterations = 1;
  int in_channels = 1;
};

inline void validate(const DiscriminatorConfig& cfg) {
  if (cfg.blocks < 1) throw ConfigError("discriminator blocks must be >= 1");
  if (cfg.base_channels < 1) throw ConfigError("base_channels must be positive");
}

/// PatchGAN: stride-2 4x4 convolutions (instance norm from block 1 on),
/// LeakyReLU, spectral norm on every convolution, 1x1 head emitting a patch
/// score map.
template <typename T>
struct Discriminator {
  DiscriminatorConfig cfg;
  std::vector<SNConv2d<T>> convs;
  std::vector<GroupNorm<T>> norms;  // norms[i] follows convs[i+1]
  std::vector<LeakyReLU<T>> acts;
  SNConv2d<T> head;

  void init(const DiscriminatorConfig& config, Rng rng) {
    validate(config);
    cfg = config;
    convs.assign(cfg.blocks, {});
    norms.assign(cfg.blocks > 1 ? cfg.blocks - 1 : 0, {});
    acts.assign(cfg.blocks, {});
    int in_c = cfg.in_channels;
    for (int i = 0; i < cfg.blocks; ++i) {
      const int out_c = cfg.base_channels << i;
      convs[i].init(in_c, out_c, 4, 2, 1, rng.substream(300 + i));
      convs[i].enabled = cfg.spectral_norm;
      convs[i].power_iterations = cfg.power_iterations;
      if (i > 0) norms[i - 1].init(out_c, out_c);  // instance norm
      acts[i].slope = static_cast<T>(cfg.leaky_slope);
      in_c = out_c;
    }
    head.init(in_c, 1, 1, 1, 0, rng.substream(400));
    head.enabled = cfg.spectral_norm;
    head.power_iterations = cfg.power_iterations;
  }

  Tensor4<T> forward(const Tensor4<T>& x, bool train = true) {
    Tensor4<T> t = x;
    for (int i = 0; i < cfg.blocks; ++i) {
      t = convs[i].forward(t, train);
      if (i > 0) t = norms[i - 1].forward(t);
      t = acts[i].forward(t, train);
    }
    return head.forward(t, train);
  }

  Tensor4<T> backward(const Tensor4<T>& gy) {
    Tensor4<T> g = head.backward(gy);
    for (int i = cfg.blocks - 1; i >= 0; --i) {
      g = acts[i].backward(g);
      if (i > 0) g = norms[i - 1].backward(g);
      g = convs[i].backward(g);
    }
    return g;
  }

  void zero_grad() {
    for (auto& c : convs) c.zero_grad();
    for (auto& n : norms) n.zero_grad();
    head.zero_grad();
  }

  std::vector<ParamRef<T>> params() {
    std::vector<ParamRef<T>> out;
    for (int i = 0; i < cfg.blocks; ++i) {
      convs[i].collect("block" + std::to_string(i) + ".conv", out);
      if (i > 0) norms[i - 1].collect("block" + std::to_string(i) + ".norm", out);
    }
    head.collect("head", out);
    return out;
  }
};

}  // namespace mriboost::nn
