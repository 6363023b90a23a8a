#pragma once

#include <algorithm>
#include <cmath>

#include "mriboost/errors.hpp"
#include "mriboost/nn/tensor.hpp"

namespace mriboost::nn {

// Cross-correlation semantics; weight layout (out_c, in_c, kh, kw).
template <typename T>
Tensor4<T> conv2d_forward(const Tensor4<T>& x, const Tensor4<T>& w, const Tensor4<T>& b,
                          int stride, int pad) {
  if (x.c != w.c) throw DataError(DataFault::shape_mismatch, "conv2d channel mismatch");
  const int oh = (x.h + 2 * pad - w.h) / stride + 1;
  const int ow = (x.w + 2 * pad - w.w) / stride + 1;
  if (oh <= 0 || ow <= 0) throw DataError(DataFault::shape_mismatch, "conv2d output empty");
  Tensor4<T> y(x.n, w.n, oh, ow);

  for (int ni = 0; ni < x.n; ++ni) {
    for (int oc = 0; oc < w.n; ++oc) {
      T* yplane = y.plane(ni, oc);
      const T bias = b.size() ? b.v[oc] : T(0);
      std::fill(yplane, yplane + static_cast<size_t>(oh) * ow, bias);
      for (int ic = 0; ic < x.c; ++ic) {
        const T* xplane = x.plane(ni, ic);
        for (int ky = 0; ky < w.h; ++ky) {
          for (int kx = 0; kx < w.w; ++kx) {
            const T wv = w.at(oc, ic, ky, kx);
            if (wv == T(0)) continue;
            for (int oy = 0; oy < oh; ++oy) {
              const int iy = oy * stride - pad + ky;
              if (iy < 0 || iy >= x.h) continue;
              const T* xrow = xplane + static_cast<size_t>(iy) * x.w;
              T* yrow = yplane + static_cast<size_t>(oy) * ow;
              if (stride == 1) {
                const int ox0 = std::max(0, pad - kx);
                const int ox1 = std::min(ow, x.w + pad - kx);
                const T* xp = xrow + (ox0 - pad + kx);
                for (int ox = ox0; ox < ox1; ++ox) yrow[ox] += wv * xp[ox - ox0];
              } else {
                for (int ox = 0; ox < ow; ++ox) {
                  const int ix = ox * stride - pad + kx;
                  if (ix >= 0 && ix < x.w) yrow[ox] += wv * xrow[ix];
                }
              }
            }
          }
        }
      }
    }
  }
  return y;
}

// Accumulates into gw/gb; writes gx (pre-zeroed by caller contract) when
// non-null.
template <typename T>
void conv2d_backward(const Tensor4<T>& x, const Tensor4<T>& w, int stride, int pad,
                     const Tensor4<T>& gy, Tensor4<T>* gx, Tensor4<T>* gw, Tensor4<T>* gb) {
  const int oh = gy.h, ow = gy.w;
  if (gb) {
    for (int ni = 0; ni < gy.n; ++ni)
      for (int oc = 0; oc < gy.c; ++oc) {
        const T* gp = gy.plane(ni, oc);
        T acc = T(0);
        for (size_t i = 0; i < static_cast<size_t>(oh) * ow; ++i) acc += gp[i];
        gb->v[oc] += acc;
      }
  }
  for (int ni = 0; ni < x.n; ++ni) {
    for (int oc = 0; oc < w.n; ++oc) {
      const T* gplane = gy.plane(ni, oc);
      for (int ic = 0; ic < x.c; ++ic) {
        const T* xplane = x.plane(ni, ic);
        T* gxplane = gx ? gx->plane(ni, ic) : nullptr;
        for (int ky = 0; ky < w.h; ++ky) {
          for (int kx = 0; kx < w.w; ++kx) {
            const T wv = w.at(oc, ic, ky, kx);
            T wacc = T(0);
            for (int oy = 0; oy < oh; ++oy) {
              const int iy = oy * stride - pad + ky;
              if (iy < 0 || iy >= x.h) continue;
              const T* grow = gplane + static_cast<size_t>(oy) * ow;
              const T* xrow = xplane + static_cast<size_t>(iy) * x.w;
              T* gxrow = gxplane ? gxplane + static_cast<size_t>(iy) * x.w : nullptr;
              for (int ox = 0; ox < ow; ++ox) {
                const int ix = ox * stride - pad + kx;
                if (ix < 0 || ix >= x.w) continue;
                wacc += xrow[ix] * grow[ox];
                if (gxrow) gxrow[ix] += wv * grow[ox];
              }
            }
            if (gw) gw->at(oc, ic, ky, kx) += wacc;
          }
        }
      }
    }
  }
}

template <typename T>
struct NormCache {
  Tensor4<T> xhat;
  std::vector<T> invstd;  // one per (n, group)
};

// Per-group zero mean / unit variance before the affine; eps inside sqrt.
template <typename T>
Tensor4<T> group_norm_forward(const Tensor4<T>& x, int groups, const Tensor4<T>& gain,
                              const Tensor4<T>& offset, NormCache<T>& cache,
                              T eps = T(1e-5)) {
  if (x.c % groups != 0)
    throw DataError(DataFault::shape_mismatch, "channels not divisible by groups");
  const int cg = x.c / groups;
  const size_t plane = static_cast<size_t>(x.h) * x.w;
  const size_t m = cg * plane;
  cache.xhat = Tensor4<T>::like(x);
  cache.invstd.assign(static_cast<size_t>(x.n) * groups, T(0));
  Tensor4<T> y = Tensor4<T>::like(x);

  for (int ni = 0; ni < x.n; ++ni) {
    for (int g = 0; g < groups; ++g) {
      T mean = T(0);
      for (int j = 0; j < cg; ++j) {
        const T* p = x.plane(ni, g * cg + j);
        for (size_t i = 0; i < plane; ++i) mean += p[i];
      }
      mean /= static_cast<T>(m);
      T var = T(0);
      for (int j = 0; j < cg; ++j) {
        const T* p = x.plane(ni, g * cg + j);
        for (size_t i = 0; i < plane; ++i) {
          const T d = p[i] - mean;
          var += d * d;
        }
      }
      var /= static_cast<T>(m);
      const T invstd = T(1) / std::sqrt(var + eps);
      cache.invstd[static_cast<size_t>(ni) * groups + g] = invstd;
      for (int j = 0; j < cg; ++j) {
        const int ch = g * cg + j;
        const T* p = x.plane(ni, ch);
        T* xh = cache.xhat.plane(ni, ch);
        T* yp = y.plane(ni, ch);
        const T a = gain.v[ch], o = offset.v[ch];
        for (size_t i = 0; i < plane; ++i) {
          xh[i] = (p[i] - mean) * invstd;
          yp[i] = a * xh[i] + o;
        }
      }
    }
  }
  return y;
}

template <typename T>
Tensor4<T> group_norm_backward(const Tensor4<T>& gy, int groups, const Tensor4<T>& gain,
                               const NormCache<T>& cache, Tensor4<T>* ggain,
                               Tensor4<T>* goffset) {
  const Tensor4<T>& xhat = cache.xhat;
  const int cg = xhat.c / groups;
  const size_t plane = static_cast<size_t>(xhat.h) * xhat.w;
  const T m = static_cast<T>(cg * plane);
  Tensor4<T> gx = Tensor4<T>::like(xhat);

  if (ggain && goffset) {
    for (int ni = 0; ni < gy.n; ++ni)
      for (int ch = 0; ch < gy.c; ++ch) {
        const T* gp = gy.plane(ni, ch);
        const T* xh = xhat.plane(ni, ch);
        T sa = T(0), so = T(0);
        for (size_t i = 0; i < plane; ++i) {
          sa += gp[i] * xh[i];
          so += gp[i];
        }
        ggain->v[ch] += sa;
        goffset->v[ch] += so;
      }
  }

  for (int ni = 0; ni < gy.n; ++ni) {
    for (int g = 0; g < groups; ++g) {
      T sum_d = T(0), sum_dx = T(0);
      for (int j = 0; j < cg; ++j) {
        const int ch = g * cg + j;
        const T* gp = gy.plane(ni, ch);
        const T* xh = xhat.plane(ni, ch);
        const T a = gain.v[ch];
        for (size_t i = 0; i < plane; ++i) {
          const T d = gp[i] * a;
          sum_d += d;
          sum_dx += d * xh[i];
        }
      }
      const T invstd = cache.invstd[static_cast<size_t>(ni) * groups + g];
      for (int j = 0; j < cg; ++j) {
        const int ch = g * cg + j;
        const T* gp = gy.plane(ni, ch);
        const T* xh = xhat.plane(ni, ch);
        T* gxp = gx.plane(ni, ch);
        const T a = gain.v[ch];
        for (size_t i = 0; i < plane; ++i) {
          const T d = gp[i] * a;
          gxp[i] = invstd * (d - sum_d / m - xh[i] * sum_dx / m);
        }
      }
    }
  }
  return gx;
}

template <typename T>
Tensor4<T> leaky_relu_forward(const Tensor4<T>& x, T slope) {
  Tensor4<T> y = x;
  for (T& v : y.v)
    if (v < T(0)) v *= slope;
  return y;
}

template <typename T>
Tensor4<T> leaky_relu_backward(const Tensor4<T>& x, const Tensor4<T>& gy, T slope) {
  Tensor4<T> gx = gy;
  for (size_t i = 0; i < x.size(); ++i)
    if (x.v[i] < T(0)) gx.v[i] *= slope;
  return gx;
}

template <typename T>
Tensor4<T> relu_forward(const Tensor4<T>& x) {
  return leaky_relu_forward(x, T(0));
}

template <typename T>
Tensor4<T> relu_backward(const Tensor4<T>& x, const Tensor4<T>& gy) {
  return leaky_relu_backward(x, gy, T(0));
}

template <typename T>
Tensor4<T> avg_pool2_forward(const Tensor4<T>& x) {
  if (x.h % 2 != 0 || x.w % 2 != 0)
    throw DataError(DataFault::shape_mismatch, "avg_pool2 needs even spatial dims");
  Tensor4<T> y(x.n, x.c, x.h / 2, x.w / 2);
  for (int ni = 0; ni < x.n; ++ni)
    for (int ci = 0; ci < x.c; ++ci)
      for (int oy = 0; oy < y.h; ++oy)
        for (int ox = 0; ox < y.w; ++ox)
          y.at(ni, ci, oy, ox) =
              (x.at(ni, ci, 2 * oy, 2 * ox) + x.at(ni, ci, 2 * oy, 2 * ox + 1) +
               x.at(ni, ci, 2 * oy + 1, 2 * ox) + x.at(ni, ci, 2 * oy + 1, 2 * ox + 1)) /
              T(4);
  return y;
}

template <typename T>
Tensor4<T> avg_pool2_backward(const Tensor4<T>& gy) {
  Tensor4<T> gx(gy.n, gy.c, gy.h * 2, gy.w * 2);
  for (int ni = 0; ni < gy.n; ++ni)
    for (int ci = 0; ci < gy.c; ++ci)
      for (int oy = 0; oy < gy.h; ++oy)
        for (int ox = 0; ox < gy.w; ++ox) {
          const T g = gy.at(ni, ci, oy, ox) / T(4);
          gx.at(ni, ci, 2 * oy, 2 * ox) = g;
          gx.at(ni, ci, 2 * oy, 2 * ox + 1) = g;
          gx.at(ni, ci, 2 * oy + 1, 2 * ox) = g;
          gx.at(ni, ci, 2 * oy + 1, 2 * ox + 1) = g;
        }
  return gx;
}

template <typename T>
Tensor4<T> upsample_nn2_forward(const Tensor4<T>& x) {
  Tensor4<T> y(x.n, x.c, x.h * 2, x.w * 2);
  for (int ni = 0; ni < x.n; ++ni)
    for (int ci = 0; ci < x.c; ++ci)
      for (int iy = 0; iy < x.h; ++iy)
        for (int ix = 0; ix < x.w; ++ix) {
          const T v = x.at(ni, ci, iy, ix);
          y.at(ni, ci, 2 * iy, 2 * ix) = v;
          y.at(ni, ci, 2 * iy, 2 * ix + 1) = v;
          y.at(ni, ci, 2 * iy + 1, 2 * ix) = v;
          y.at(ni, ci, 2 * iy + 1, 2 * ix + 1) = v;
        }
  return y;
}

template <typename T>
Tensor4<T> upsample_nn2_backward(const Tensor4<T>& gy) {
  Tensor4<T> gx(gy.n, gy.c, gy.h / 2, gy.w / 2);
  for (int ni = 0; ni < gy.n; ++ni)
    for (int ci = 0; ci < gy.c; ++ci)
      for (int iy = 0; iy < gx.h; ++iy)
        for (int ix = 0; ix < gx.w; ++ix)
          gx.at(ni, ci, iy, ix) = gy.at(ni, ci, 2 * iy, 2 * ix) +
                                  gy.at(ni, ci, 2 * iy, 2 * ix + 1) +
                                  gy.at(ni, ci, 2 * iy + 1, 2 * ix) +
                                  gy.at(ni, ci, 2 * iy + 1, 2 * ix + 1);
  return gx;
}

template <typename T>
Tensor4<T> concat_channels(const Tensor4<T>& a, const Tensor4<T>& b) {
  if (a.n != b.n || a.h != b.h || a.w != b.w)
    throw DataError(DataFault::shape_mismatch, "concat_channels spatial mismatch");
  Tensor4<T> y(a.n, a.c + b.c, a.h, a.w);
  const size_t plane = static_cast<size_t>(a.h) * a.w;
  for (int ni = 0; ni < a.n; ++ni) {
    for (int ci = 0; ci < a.c; ++ci)
      std::copy_n(a.plane(ni, ci), plane, y.plane(ni, ci));
    for (int ci = 0; ci < b.c; ++ci)
      std::copy_n(b.plane(ni, ci), plane, y.plane(ni, a.c + ci));
  }
  return y;
}

template <typename T>
std::pair<Tensor4<T>, Tensor4<T>> split_channels(const Tensor4<T>& y, int c_first) {
  Tensor4<T> a(y.n, c_first, y.h, y.w), b(y.n, y.c - c_first, y.h, y.w);
  const size_t plane = static_cast<size_t>(y.h) * y.w;
  for (int ni = 0; ni < y.n; ++ni) {
    for (int ci = 0; ci < a.c; ++ci)
      std::copy_n(y.plane(ni, ci), plane, a.plane(ni, ci));
    for (int ci = 0; ci < b.c; ++ci)
      std::copy_n(y.plane(ni, c_first + ci), plane, b.plane(ni, ci));
  }
  return {std::move(a), std::move(b)};
}

/// Power-iteration estimate of the leading singular value of the weight
/// reshaped to (out, rest). Updates u (and v) in place. A zero weight leaves
/// u untouched and reports sigma 0.
template <typename T>
T spectral_sigma(const Tensor4<T>& w, std::vector<T>& u, std::vector<T>& v, int iterations) {
  const int rows = w.n;
  const int cols = static_cast<int>(w.size()) / rows;
  if (u.size() != static_cast<size_t>(rows)) u.assign(rows, T(1) / std::sqrt(static_cast<T>(rows)));
  v.assign(cols, T(0));

  T norm_w = T(0);
  for (T x : w.v) norm_w += x * x;
  if (norm_w == T(0)) return T(0);

  auto normalize = [](std::vector<T>& a) {
    T n = T(0);
    for (T x : a) n += x * x;
    n = std::sqrt(n);
    if (n > T(0))
      for (T& x : a) x /= n;
    return n;
  };

  for (int it = 0; it < iterations; ++it) {
    // v = W^T u
    std::fill(v.begin(), v.end(), T(0));
    for (int r = 0; r < rows; ++r) {
      const T* row = w.v.data() + static_cast<size_t>(r) * cols;
      const T ur = u[r];
      for (int c = 0; c < cols; ++c) v[c] += row[c] * ur;
    }
    normalize(v);
    // u = W v
    for (int r = 0; r < rows; ++r) {
      const T* row = w.v.data() + static_cast<size_t>(r) * cols;
      T acc = T(0);
      for (int c = 0; c < cols; ++c) acc += row[c] * v[c];
      u[r] = acc;
    }
    normalize(u);
  }
  // sigma = u^T W v
  T sigma = T(0);
  for (int r = 0; r < rows; ++r) {
    const T* row = w.v.data() + static_cast<size_t>(r) * cols;
    T acc = T(0);
    for (int c = 0; c < cols; ++c) acc += row[c] * v[c];
    sigma += u[r] * acc;
  }
  return sigma;
}

template <typename T>
Tensor4<T> spectral_normalize(const Tensor4<T>& w, std::vector<T>& u, int iterations) {
  std::vector<T> v;
  const T sigma = spectral_sigma(w, u, v, iterations);
  Tensor4<T> out = w;
  if (sigma > T(0))
    for (T& x : out.v) x /= sigma;
  return out;
}

}  // namespace mriboost::nn
