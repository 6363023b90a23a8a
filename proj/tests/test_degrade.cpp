#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numeric>

#include "mriboost/degrade.hpp"
#include "mriboost/rng.hpp"

using namespace mriboost;

namespace {

// Symmetric edge-repeat reflection, written independently of the library
// code: the extended signal has period 2n with x[-1] = x[0], x[n] = x[n-1].
int reflect_index(int i, int n) {
  const int period = 2 * n;
  int m = i % period;
  if (m < 0) m += period;
  return m < n ? m : period - 1 - m;
}

// Full 2D convolution with the separable kernel's outer product; an O(N^2 K^2)
// oracle for the separable row/column implementation.
std::vector<double> brute_blur(const std::vector<double>& img, int h, int w,
                               const std::vector<double>& k) {
  const int half = static_cast<int>(k.size()) / 2;
  std::vector<double> out(static_cast<size_t>(h) * w, 0.0);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      double acc = 0.0;
      for (int dy = -half; dy <= half; ++dy)
        for (int dx = -half; dx <= half; ++dx) {
          const int sy = reflect_index(y + dy, h);
          const int sx = reflect_index(x + dx, w);
          acc += k[dy + half] * k[dx + half] *
                 img[static_cast<size_t>(sy) * w + sx];
        }
      out[static_cast<size_t>(y) * w + x] = acc;
    }
  return out;
}

double total_variation(const RealGrid& g) {
  double tv = 0.0;
  for (int y = 0; y < g.height; ++y)
    for (int x = 0; x + 1 < g.width; ++x) tv += std::abs(g.at(y, x + 1) - g.at(y, x));
  for (int y = 0; y + 1 < g.height; ++y)
    for (int x = 0; x < g.width; ++x) tv += std::abs(g.at(y + 1, x) - g.at(y, x));
  return tv;
}

}  // namespace

TEST_CASE("gaussian kernel: sigma 0.5 tap values") {
  const auto k = gaussian_kernel(0.5);
  REQUIRE(k.size() == 5);
  // direct evaluation: w(t) = exp(-t^2/(2*0.25)) normalized over t in [-2,2]
  std::vector<double> expect(5);
  double sum = 0.0;
  for (int t = -2; t <= 2; ++t) sum += std::exp(-t * t / 0.5);
  for (int t = -2; t <= 2; ++t) expect[t + 2] = std::exp(-t * t / 0.5) / sum;
  for (int i = 0; i < 5; ++i) CHECK(k[i] == doctest::Approx(expect[i]).epsilon(1e-12));
  CHECK(k[2] == doctest::Approx(0.7864).epsilon(1e-3));
  CHECK(k[1] == doctest::Approx(0.1065).epsilon(1e-3));
  CHECK(k[0] == doctest::Approx(0.0003).epsilon(2e-1));
}

TEST_CASE("gaussian kernel: degenerate sigma gives the discrete delta") {
  for (double s : {0.0, 1e-4, 9.99e-4}) {
    const auto k = gaussian_kernel(s);
    REQUIRE(k.size() == 3);
    CHECK(k[0] == 0.0);
    CHECK(k[1] == 1.0);
    CHECK(k[2] == 0.0);
  }
}

TEST_CASE("gaussian kernel: width, symmetry, normalization") {
  for (double s : {0.2, 0.5, 0.9, 0.999}) {
    const auto k = gaussian_kernel(s);
    const int half = std::max(1, static_cast<int>(std::ceil(3.0 * s)));
    CHECK(static_cast<int>(k.size()) == 2 * half + 1);
    CHECK(std::accumulate(k.begin(), k.end(), 0.0) == doctest::Approx(1.0).epsilon(1e-12));
    for (size_t i = 0; i < k.size(); ++i) CHECK(k[i] == k[k.size() - 1 - i]);
  }
}

TEST_CASE("separable blur matches the full 2D convolution oracle") {
  Rng rng(55);
  for (auto [h, w] : {std::pair{8, 8}, {5, 9}, {12, 7}}) {
    std::vector<double> img(static_cast<size_t>(h) * w);
    for (double& v : img) v = rng.normal(0.0, 1.0);
    for (double s : {0.3, 0.7, 0.95}) {
      const auto k = gaussian_kernel(s);
      const auto fast = blur_separable(img, h, w, k);
      const auto slow = brute_blur(img, h, w, k);
      for (size_t i = 0; i < fast.size(); ++i)
        CHECK(fast[i] == doctest::Approx(slow[i]).epsilon(1e-12));
    }
  }
}

TEST_CASE("blur adjoint: <Ax, y> == <x, A^T y>") {
  Rng rng(66);
  const int h = 9, w = 7;
  std::vector<double> x(h * w), y(h * w);
  for (double& v : x) v = rng.normal(0.0, 1.0);
  for (double& v : y) v = rng.normal(0.0, 1.0);
  const auto k = gaussian_kernel(0.8);
  const auto ax = blur_separable(x, h, w, k);
  const auto aty = blur_separable_adjoint(y, h, w, k);
  double lhs = 0.0, rhs = 0.0;
  for (int i = 0; i < h * w; ++i) {
    lhs += ax[i] * y[i];
    rhs += x[i] * aty[i];
  }
  CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
}

TEST_CASE("blur preserves the mean and reduces total variation") {
  Rng rng(77);
  RealGrid g(24, 24);
  for (float& v : g.data) v = static_cast<float>(rng.uniform());
  const double mean0 = std::accumulate(g.data.begin(), g.data.end(), 0.0) / g.size();

  DegradationParams psi;
  psi.sigma_k = 0.8;
  psi.sigma_n = 0.0;
  Rng nrng(1);
  const RealGrid b = degrade(g, psi, nrng);
  const double mean1 = std::accumulate(b.data.begin(), b.data.end(), 0.0) / b.size();
  CHECK(mean1 == doctest::Approx(mean0).epsilon(1e-6));
  CHECK(total_variation(b) < total_variation(g));

  // stronger blur flattens more
  psi.sigma_k = 0.95;
  Rng nrng2(1);
  const RealGrid b2 = degrade(g, psi, nrng2);
  CHECK(total_variation(b2) < total_variation(b));
}

TEST_CASE("noise standard deviation lands near sigma_n") {
  RealGrid g(128, 128);  // constant zero
  DegradationParams psi;
  psi.sigma_k = 0.0;
  psi.sigma_n = 0.05;
  Rng nrng(42);
  const RealGrid noisy = degrade(g, psi, nrng);
  double s2 = 0.0;
  for (float v : noisy.data) s2 += double(v) * v;
  const double sd = std::sqrt(s2 / noisy.size());
  CHECK(sd == doctest::Approx(0.05).epsilon(0.05));
}

TEST_CASE("sample_psi: beta draw vs fixed ablation value") {
  DegradationConfig cfg;
  Rng a(9), b(9), c(10);
  const auto p1 = sample_psi(cfg, a);
  const auto p2 = sample_psi(cfg, b);
  const auto p3 = sample_psi(cfg, c);
  CHECK(p1.sigma_k == p2.sigma_k);
  CHECK(p1.sigma_k != p3.sigma_k);
  CHECK(p1.sigma_k > 0.0);
  CHECK(p1.sigma_k < 1.0);
  CHECK(p1.sigma_n == cfg.sigma_n);
  CHECK(p1.mu_k == 0.0);
  CHECK(p1.mu_n == 0.0);

  cfg.sigma_k_fixed = 0.5;
  Rng d(11);
  CHECK(sample_psi(cfg, d).sigma_k == 0.5);

  cfg.enable_noise = false;
  Rng e(12);
  CHECK(sample_psi(cfg, e).sigma_n == 0.0);
}

TEST_CASE("degrade is deterministic in its rng") {
  Rng prng(3);
  RealGrid g(16, 16);
  for (float& v : g.data) v = static_cast<float>(prng.uniform());
  DegradationParams psi;
  psi.sigma_k = 0.4;
  psi.sigma_n = 0.02;
  Rng r1(5), r2(5), r3(6);
  const RealGrid a = degrade(g, psi, r1);
  const RealGrid b = degrade(g, psi, r2);
  const RealGrid c = degrade(g, psi, r3);
  CHECK(a == b);
  CHECK(!(a == c));
}
