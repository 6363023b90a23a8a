#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace mriboost::nn {

/// Dense NCHW tensor; the carrier for activations and weights.
template <typename T>
struct Tensor4 {
  int n = 0, c = 0, h = 0, w = 0;
  std::vector<T> v;

  Tensor4() = default;
  Tensor4(int n_, int c_, int h_, int w_)
      : n(n_), c(c_), h(h_), w(w_), v(static_cast<size_t>(n_) * c_ * h_ * w_, T(0)) {}

  size_t size() const { return v.size(); }

  T& at(int i, int j, int y, int x) {
    return v[((static_cast<size_t>(i) * c + j) * h + y) * w + x];
  }
  T at(int i, int j, int y, int x) const {
    return v[((static_cast<size_t>(i) * c + j) * h + y) * w + x];
  }

  T* plane(int i, int j) { return v.data() + (static_cast<size_t>(i) * c + j) * h * w; }
  const T* plane(int i, int j) const {
    return v.data() + (static_cast<size_t>(i) * c + j) * h * w;
  }

  void zero() { std::fill(v.begin(), v.end(), T(0)); }
  bool same_shape(const Tensor4& o) const {
    return n == o.n && c == o.c && h == o.h && w == o.w;
  }
  static Tensor4 like(const Tensor4& o) { return Tensor4(o.n, o.c, o.h, o.w); }
};

/// Named handle onto a trainable tensor and its gradient buffer.
template <typename T>
struct ParamRef {
  std::string name;
  Tensor4<T>* value = nullptr;
  Tensor4<T>* grad = nullptr;
};

}  // namespace mriboost::nn
