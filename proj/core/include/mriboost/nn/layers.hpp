#pragma once

#include <string>
#include <vector>

#include "mriboost/nn/ops.hpp"
#include "mriboost/rng.hpp"

namespace mriboost::nn {

template <typename T>
struct Conv2d {
  Tensor4<T> w, b, gw, gb;
  int stride = 1, pad = 0;
  Tensor4<T> x_cache;

  void init(int in_c, int out_c, int k, int stride_, int pad_, Rng rng) {
    stride = stride_;
    pad = pad_;
    w = Tensor4<T>(out_c, in_c, k, k);
    b = Tensor4<T>(1, out_c, 1, 1);
    gw = Tensor4<T>::like(w);
    gb = Tensor4<T>::like(b);
    const double he = std::sqrt(2.0 / (static_cast<double>(in_c) * k * k));
    for (T& v : w.v) v = static_cast<T>(rng.normal(0.0, he));
  }

  Tensor4<T> forward(const Tensor4<T>& x, bool train = true) {
    if (train) x_cache = x;
    return conv2d_forward(x, w, b, stride, pad);
  }

  Tensor4<T> backward(const Tensor4<T>& gy) {
    Tensor4<T> gx = Tensor4<T>::like(x_cache);
    conv2d_backward(x_cache, w, stride, pad, gy, &gx, &gw, &gb);
    return gx;
  }

  void zero_grad() {
    gw.zero();
    gb.zero();
  }

  void collect(const std::string& prefix, std::vector<ParamRef<T>>& out) {
    out.push_back({prefix + ".w", &w, &gw});
    out.push_back({prefix + ".b", &b, &gb});
  }
};

/// Group normalization layer; instance norm is groups == channels.
template <typename T>
struct GroupNorm {
  Tensor4<T> gain, offset, ggain, goffset;
  int groups = 1;
  NormCache<T> cache;

  void init(int channels, int groups_) {
    groups = groups_;
    gain = Tensor4<T>(1, channels, 1, 1);
    offset = Tensor4<T>(1, channels, 1, 1);
    for (T& v : gain.v) v = T(1);
    ggain = Tensor4<T>::like(gain);
    goffset = Tensor4<T>::like(offset);
  }

  Tensor4<T> forward(const Tensor4<T>& x) {
    return group_norm_forward(x, groups, gain, offset, cache);
  }

  Tensor4<T> backward(const Tensor4<T>& gy) {
    return group_norm_backward(gy, groups, gain, cache, &ggain, &goffset);
  }

  void zero_grad() {
    ggain.zero();
    goffset.zero();
  }

  void collect(const std::string& prefix, std::vector<ParamRef<T>>& out) {
    out.push_back({prefix + ".gain", &gain, &ggain});
    out.push_back({prefix + ".offset", &offset, &goffset});
  }
};

template <typename T>
struct LeakyReLU {
  T slope = T(0);
  Tensor4<T> x_cache;

  Tensor4<T> forward(const Tensor4<T>& x, bool train = true) {
    if (train) x_cache = x;
    return leaky_relu_forward(x, slope);
  }
  Tensor4<T> backward(const Tensor4<T>& gy) {
    return leaky_relu_backward(x_cache, gy, slope);
  }
};

/// Convolution with spectral normalization. The raw weight is the trainable
/// parameter; the forward pass convolves with w / sigma. The gradient treats
/// the power-iteration vectors as constants:
///   gw = (g_wbar - sum(g_wbar * wbar) * u v^T) / sigma
template <typename T>
struct SNConv2d {
  Conv2d<T> conv;        // holds raw w, b and their grads
  std::vector<T> u, v_cache;
  T sigma_cache = T(1);
  Tensor4<T> wbar_cache;
  bool enabled = true;
  int power_iterations = 1;

  void init(int in_c, int out_c, int k, int stride, int pad, Rng rng) {
    conv.init(in_c, out_c, k, stride, pad, rng);
  }

  Tensor4<T> forward(const Tensor4<T>& x, bool train = true) {
    if (!enabled) return conv.forward(x, train);
    sigma_cache = spectral_sigma(conv.w, u, v_cache, power_iterations);
    wbar_cache = conv.w;
    if (sigma_cache > T(0))
      for (T& s : wbar_cache.v) s /= sigma_cache;
    if (train) conv.x_cache = x;
    return conv2d_forward(x, wbar_cache, conv.b, conv.stride, conv.pad);
  }

  Tensor4<T> backward(const Tensor4<T>& gy) {
    if (!enabled) return conv.backward(gy);
    Tensor4<T> gx = Tensor4<T>::like(conv.x_cache);
    Tensor4<T> gwbar = Tensor4<T>::like(conv.w);
    conv2d_backward(conv.x_cache, wbar_cache, conv.stride, conv.pad, gy, &gx, &gwbar,
                    &conv.gb);
    if (sigma_cache > T(0)) {
      T dot = T(0);
      for (size_t i = 0; i < gwbar.size(); ++i) dot += gwbar.v[i] * wbar_cache.v[i];
      const int rows = conv.w.n;
      const int cols = static_cast<int>(conv.w.size()) / rows;
      for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c) {
          const size_t i = static_cast<size_t>(r) * cols + c;
          conv.gw.v[i] += (gwbar.v[i] - dot * u[r] * v_cache[c]) / sigma_cache;
        }
    }
    return gx;
  }

  void zero_grad() { conv.zero_grad(); }

  void collect(const std::string& prefix, std::vector<ParamRef<T>>& out) {
    conv.collect(prefix, out);
  }
};

}  // namespace mriboost::nn
