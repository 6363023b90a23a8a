#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "mriboost/errors.hpp"
#include "mriboost/metrics.hpp"
#include "mriboost/rng.hpp"

using namespace mriboost;

namespace {

RealGrid random_grid(int n, std::uint64_t seed, float lo = 0.0f, float hi = 1.0f) {
  Rng rng(seed);
  RealGrid g(n, n);
  for (float& v : g.data) v = static_cast<float>(rng.uniform(lo, hi));
  return g;
}

// Direct PSNR from the definition as an oracle.
double psnr_oracle(const RealGrid& ref, const RealGrid& test) {
  double peak = *std::max_element(ref.data.begin(), ref.data.end());
  double mse = 0.0;
  for (size_t i = 0; i < ref.size(); ++i) {
    const double d = double(ref.data[i]) - double(test.data[i]);
    mse += d * d;
  }
  mse /= ref.size();
  return 10.0 * std::log10(peak * peak / mse);
}

}  // namespace

TEST_CASE("psnr: constant offset worked example") {
  // ref is all ones (peak 1), test differs by 0.1 everywhere: MSE = 0.01,
  // PSNR = 10*log10(1/0.01) = 20 dB
  RealGrid ref(8, 8, std::vector<float>(64, 1.0f));
  RealGrid test(8, 8, std::vector<float>(64, 0.9f));
  CHECK(psnr(ref, test) == doctest::Approx(20.0).epsilon(1e-4));
}

TEST_CASE("psnr: identical inputs hit the cap") {
  const RealGrid g = random_grid(16, 4);
  CHECK(psnr(g, g) == kPsnrCap);
}

TEST_CASE("psnr matches the direct-formula oracle") {
  for (int trial = 0; trial < 10; ++trial) {
    const RealGrid ref = random_grid(20, 100 + trial, 0.1f, 2.0f);
    RealGrid test = ref;
    Rng rng(200 + trial);
    for (float& v : test.data) v += static_cast<float>(rng.normal(0.0, 0.05));
    CHECK(psnr(ref, test) == doctest::Approx(psnr_oracle(ref, test)).epsilon(1e-9));
  }
}

TEST_CASE("psnr: shape mismatch is a data error") {
  CHECK_THROWS_AS(psnr(RealGrid(4, 4), RealGrid(4, 5)), DataError);
  CHECK_THROWS_AS(ssim(RealGrid(16, 16), RealGrid(16, 12)), DataError);
}

TEST_CASE("ssim: identical inputs give exactly 1") {
  const RealGrid g = random_grid(32, 9);
  CHECK(ssim(g, g) == 1.0);
}

TEST_CASE("ssim penalizes structural change more than a constant offset") {
  const RealGrid ref = random_grid(32, 10, 0.2f, 0.8f);

  RealGrid offset = ref;
  for (float& v : offset.data) v += 0.05f;

  RealGrid shuffled = ref;
  // translate by two pixels: strong structural disruption of fine texture
  for (int y = 0; y < 32; ++y)
    for (int x = 0; x < 32; ++x) shuffled.at(y, x) = ref.at(y, (x + 2) % 32);

  CHECK(ssim(ref, offset) > ssim(ref, shuffled));
}

TEST_CASE("ssim degrades monotonically with noise level") {
  const RealGrid ref = random_grid(48, 11, 0.2f, 0.8f);
  double prev = 1.0;
  for (double sigma : {0.01, 0.05, 0.15}) {
    RealGrid noisy = ref;
    Rng rng(300);
    for (float& v : noisy.data) v += static_cast<float>(rng.normal(0.0, sigma));
    const double s = ssim(ref, noisy);
    CHECK(s < prev);
    CHECK(s > 0.0);
    prev = s;
  }
  CHECK(1.0 - prev < 1.0);  // even the worst case stays informative
}

TEST_CASE("ssim: small perturbation keeps 1 - ssim below 0.2") {
  const RealGrid ref = random_grid(32, 12, 0.2f, 0.8f);
  RealGrid near = ref;
  Rng rng(13);
  for (float& v : near.data) v += static_cast<float>(rng.normal(0.0, 0.01));
  CHECK(1.0 - ssim(ref, near) < 0.2);
}

TEST_CASE("ssim is bounded by 1 and symmetric-ish under swap for same range") {
  const RealGrid a = random_grid(24, 21, 0.0f, 1.0f);
  const RealGrid b = random_grid(24, 22, 0.0f, 1.0f);
  CHECK(ssim(a, b) <= 1.0);
  CHECK(ssim(a, b) >= -1.0);
}
