#pragma once

#include <vector>

#include "mriboost/errors.hpp"
#include "mriboost/nn/layers.hpp"

namespace mriboost::nn {

struct GeneratorConfig {
  int stages = 4;
  int base_channels = 64;  // doubles per stage
  int norm_groups = 8;
  int in_channels = 1;
  int out_channels = 1;
};

inline void validate(const GeneratorConfig& cfg) {
  if (cfg.stages < 1) throw ConfigError("generator stages must be >= 1");
  if (cfg.base_channels < 1 || cfg.base_channels % cfg.norm_groups != 0)
    throw ConfigError("base_channels must be a positive multiple of norm_groups");
}

/// conv3x3 + group norm + ReLU, twice.
template <typename T>
struct DoubleConv {
  Conv2d<T> c1, c2;
  GroupNorm<T> n1, n2;
  LeakyReLU<T> a1, a2;  // slope 0 == plain ReLU

  void init(int in_c, int out_c, int groups, Rng rng) {
    c1.init(in_c, out_c, 3, 1, 1, rng.substream(0));
    c2.init(out_c, out_c, 3, 1, 1, rng.substream(1));
    n1.init(out_c, groups);
    n2.init(out_c, groups);
  }

  Tensor4<T> forward(const Tensor4<T>& x, bool train = true) {
    Tensor4<T> t = a1.forward(n1.forward(c1.forward(x, train)), train);
    return a2.forward(n2.forward(c2.forward(t, train)), train);
  }

  Tensor4<T> backward(const Tensor4<T>& gy) {
    Tensor4<T> g = c2.backward(n2.backward(a2.backward(gy)));
    return c1.backward(n1.backward(a1.backward(g)));
  }

  void zero_grad() {
    c1.zero_grad();
    c2.zero_grad();
    n1.zero_grad();
    n2.zero_grad();
  }

  void collect(const std::string& prefix, std::vector<ParamRef<T>>& out) {
    c1.collect(prefix + ".c1", out);
    n1.collect(prefix + ".n1", out);
    c2.collect(prefix + ".c2", out);
    n2.collect(prefix + ".n2", out);
  }
};

/// Encoder/decoder with skip concatenation, average pooling down and
/// nearest-neighbor upsampling, 1x1 output head.
template <typename T>
struct Generator {
  GeneratorConfig cfg;
  std::vector<DoubleConv<T>> enc;
  DoubleConv<T> bottleneck;
  std::vector<DoubleConv<T>> dec;  // dec[i] operates at stage i
  Conv2d<T> head;

  std::vector<Tensor4<T>> skips;  // cached encoder activations

  void init(const GeneratorConfig& config, Rng rng) {
    validate(config);
    cfg = config;
    enc.assign(cfg.stages, {});
    dec.assign(cfg.stages, {});
    int in_c = cfg.in_channels;
    for (int i = 0; i < cfg.stages; ++i) {
      const int out_c = cfg.base_channels << i;
      enc[i].init(in_c, out_c, cfg.norm_groups, rng.substream(10 + i));
      in_c = out_c;
    }
    const int bneck = cfg.base_channels << cfg.stages;
    bottleneck.init(in_c, bneck, cfg.norm_groups, rng.substream(50));
    for (int i = cfg.stages - 1; i >= 0; --i) {
      const int out_c = cfg.base_channels << i;
      dec[i].init((out_c << 1) + out_c, out_c, cfg.norm_groups, rng.substream(100 + i));
    }
    head.init(cfg.base_channels, cfg.out_channels, 1, 1, 0, rng.substream(200));
  }

  int bottleneck_channels() const { return cfg.base_channels << cfg.stages; }

  Tensor4<T> forward(const Tensor4<T>& x, bool train = true) {
    if (x.h % (1 << cfg.stages) != 0 || x.w % (1 << cfg.stages) != 0)
      throw DataError(DataFault::shape_mismatch,
                      "generator input dims must be divisible by 2^stages");
    skips.assign(cfg.stages, {});
    Tensor4<T> t = x;
    for (int i = 0; i < cfg.stages; ++i) {
      t = enc[i].forward(t, train);
      skips[i] = t;
      t = avg_pool2_forward(t);
    }
    t = bottleneck.forward(t, train);
    for (int i = cfg.stages - 1; i >= 0; --i) {
      t = upsample_nn2_forward(t);
      t = concat_channels(t, skips[i]);
      t = dec[i].forward(t, train);
    }
    return head.forward(t, train);
  }

  Tensor4<T> backward(const Tensor4<T>& gy) {
    Tensor4<T> g = head.backward(gy);
    std::vector<Tensor4<T>> skip_grads(cfg.stages);
    for (int i = 0; i < cfg.stages; ++i) {
      g = dec[i].backward(g);
      auto [g_up, g_skip] = split_channels(g, g.c - (cfg.base_channels << i));
      skip_grads[i] = std::move(g_skip);
      g = upsample_nn2_backward(g_up);
    }
    g = bottleneck.backward(g);
    for (int i = cfg.stages - 1; i >= 0; --i) {
      g = avg_pool2_backward(g);
      for (size_t j = 0; j < g.size(); ++j) g.v[j] += skip_grads[i].v[j];
      g = enc[i].backward(g);
    }
    return g;
  }

  void zero_grad() {
    for (auto& e : enc) e.zero_grad();
    bottleneck.zero_grad();
    for (auto& d : dec) d.zero_grad();
    head.zero_grad();
  }

  std::vector<ParamRef<T>> params() {
    std::vector<ParamRef<T>> out;
    for (int i = 0; i < cfg.stages; ++i) enc[i].collect("enc" + std::to_string(i), out);
    bottleneck.collect("bottleneck", out);
    for (int i = 0; i < cfg.stages; ++i) dec[i].collect("dec" + std::to_string(i), out);
    head.collect("head", out);
    return out;
  }
};

}  // namespace mriboost::nn
