#include "mriboost/phantom.hpp"

#include <algorithm>
#include <cmath>

#include "mriboost/errors.hpp"

namespace mriboost {

void validate(const PhantomConfig& cfg) {
  if (cfg.count < 1) throw ConfigError("phantom count must be >= 1");
  if (cfg.size < 16) throw ConfigError("phantom size must be >= 16");
  if (cfg.min_ellipses < 1 || cfg.max_ellipses < cfg.min_ellipses)
    throw ConfigError("bad ellipse count range");
  if (!(cfg.min_intensity >= 0.0 && cfg.max_intensity <= 1.0 &&
        cfg.min_intensity <= cfg.max_intensity))
    throw ConfigError("intensity range must lie within [0,1]");
}

std::vector<RealGrid> generate_phantoms(const PhantomConfig& cfg) {
  validate(cfg);
  const Rng root(cfg.seed);
  std::vector<RealGrid> out;
  out.reserve(cfg.count);
  const double s = static_cast<double>(cfg.size);

  for (int n = 0; n < cfg.count; ++n) {
    Rng rng = root.substream(static_cast<std::uint64_t>(n));
    RealGrid g(cfg.size, cfg.size);
    const int n_ell =
        static_cast<int>(rng.uniform_int(cfg.min_ellipses, cfg.max_ellipses));

    for (int e = 0; e < n_ell; ++e) {
      const double cx = rng.uniform(0.15, 0.85) * s;
      const double cy = rng.uniform(0.15, 0.85) * s;
      const double ax = rng.uniform(0.05, 0.35) * s;
      const double ay = rng.uniform(0.05, 0.35) * s;
      const double theta = rng.uniform(0.0, M_PI);
      const double amp = rng.uniform(cfg.min_intensity, cfg.max_intensity);
      const double ct = std::cos(theta), st = std::sin(theta);

      for (int r = 0; r < cfg.size; ++r) {
        for (int c = 0; c < cfg.size; ++c) {
          const double dx = c - cx, dy = r - cy;
          const double u = (ct * dx + st * dy) / ax;
          const double v = (-st * dx + ct * dy) / ay;
          if (u * u + v * v <= 1.0) g.at(r, c) += static_cast<float>(amp);
        }
      }
    }
    for (float& v : g.data) v = std::clamp(v, 0.0f, 1.0f);
    out.push_back(std::move(g));
  }
  return out;
}

}  // namespace mriboost
