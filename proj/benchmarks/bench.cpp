#include <benchmark/benchmark.h>

#include "mriboost/degrade.hpp"
#include "mriboost/kspace.hpp"
#include "mriboost/nn/generator.hpp"
#include "mriboost/rng.hpp"

namespace mb = mriboost;

namespace {

mb::RealGrid random_grid(int n, std::uint64_t seed) {
  mb::Rng rng(seed);
  mb::RealGrid g(n, n);
  for (float& v : g.data) v = static_cast<float>(rng.normal(0.0, 1.0));
  return g;
}

void BM_fft2c(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const mb::KGrid k = mb::to_kgrid(random_grid(n, 1));
  for (auto _ : state) benchmark::DoNotOptimize(mb::fft2c(k));
}
BENCHMARK(BM_fft2c)->Arg(64)->Arg(128)->Arg(256);

void BM_blur_separable(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const mb::RealGrid g = random_grid(n, 2);
  std::vector<double> img(g.data.begin(), g.data.end());
  const std::vector<double> kern = mb::gaussian_kernel(1.5);
  for (auto _ : state)
    benchmark::DoNotOptimize(mb::blur_separable(img, n, n, kern));
}
BENCHMARK(BM_blur_separable)->Arg(64)->Arg(256);

void BM_make_mask(benchmark::State& state) {
  const int w = static_cast<int>(state.range(0));
  std::uint64_t seed = 0;
  for (auto _ : state) {
    mb::Rng rng(seed++);
    benchmark::DoNotOptimize(mb::make_mask(w, 4.0, 0.06, rng));
  }
}
BENCHMARK(BM_make_mask)->Arg(180)->Arg(512);

void BM_generator_forward(benchmark::State& state) {
  mb::nn::GeneratorConfig cfg;
  cfg.stages = 2;
  cfg.base_channels = 8;
  mb::nn::Generator<float> gen;
  gen.init(cfg, mb::Rng(3));
  mb::nn::Tensor4<float> x(1, 1, 64, 64);
  mb::Rng vr(4);
  for (float& v : x.v) v = static_cast<float>(vr.normal(0.0, 1.0));
  for (auto _ : state) benchmark::DoNotOptimize(gen.forward(x));
}
BENCHMARK(BM_generator_forward);

}  // namespace

BENCHMARK_MAIN();
