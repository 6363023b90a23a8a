#pragma once

#include <cmath>
#include <vector>

#include "mriboost/errors.hpp"
#include "mriboost/nn/tensor.hpp"

namespace mriboost::nn {

/// Bias-corrected Adam with an epoch-indexed step learning-rate decay.
/// Moments are kept in double regardless of the weight precision.
template <typename T>
struct Adam {
  double beta1 = 0.5;
  double beta2 = 0.999;
  double eps = 1e-8;
  double lr = 1e-4;
  int decay_epoch = 100;
  double decay_factor = 0.1;
  long step_count = 0;

  std::vector<std::vector<double>> m, v;

  double effective_lr(int epoch) const {
    return epoch >= decay_epoch ? lr * decay_factor : lr;
  }

  void step(std::vector<ParamRef<T>>& params, int epoch) {
    if (m.empty()) {
      m.resize(params.size());
      v.resize(params.size());
      for (size_t p = 0; p < params.size(); ++p) {
        m[p].assign(params[p].value->size(), 0.0);
        v[p].assign(params[p].value->size(), 0.0);
      }
    }
    ++step_count;
    const double a = effective_lr(epoch);
    const double bc1 = 1.0 - std::pow(beta1, static_cast<double>(step_count));
    const double bc2 = 1.0 - std::pow(beta2, static_cast<double>(step_count));
    for (size_t p = 0; p < params.size(); ++p) {
      auto& wv = params[p].value->v;
      const auto& gv = params[p].grad->v;
      for (size_t i = 0; i < wv.size(); ++i) {
        const double g = static_cast<double>(gv[i]);
        if (!std::isfinite(g))
          throw DivergenceError("non-finite gradient in " + params[p].name);
        m[p][i] = beta1 * m[p][i] + (1.0 - beta1) * g;
        v[p][i] = beta2 * v[p][i] + (1.0 - beta2) * g * g;
        const double mhat = m[p][i] / bc1;
        const double vhat = v[p][i] / bc2;
        wv[i] = static_cast<T>(static_cast<double>(wv[i]) -
                               a * mhat / (std::sqrt(vhat) + eps));
      }
    }
  }
};

}  // namespace mriboost::nn
