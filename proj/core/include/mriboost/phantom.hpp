#pragma once

#include <cstdint>
#include <vector>

#include "mriboost/grid.hpp"
#include "mriboost/rng.hpp"

namespace mriboost {

/// Desk-scale synthetic dataset: sums of randomly placed and rotated filled
/// ellipses, clipped to [0,1]. Ellipses give the two features the pipeline
/// acts on: sharp edges and smooth interior regions.
struct PhantomConfig {
  int count = 1;
  int size = 64;  // square, pixels
  int min_ellipses = 2;
  int max_ellipses = 8;
  double min_intensity = 0.2;
  double max_intensity = 0.9;
  std::uint64_t seed = 0;
};

void validate(const PhantomConfig& cfg);

/// Deterministic in cfg.seed: same config produces byte-identical grids.
std::vector<RealGrid> generate_phantoms(const PhantomConfig& cfg);

}  // namespace mriboost
