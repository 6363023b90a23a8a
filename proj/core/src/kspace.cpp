#include "mriboost/kspace.hpp"

#include <fftw3.h>

#include <algorithm>
#include <map>
#include <mutex>

#include <nlohmann/json.hpp>

#include "mriboost/errors.hpp"

namespace mriboost {

namespace {

// Plan cache keyed by (h, w, sign). Plans are created once under a lock and
// executed via fftw_execute_dft, which is thread-safe.
class PlanCache {
public:
  fftw_plan get(int h, int w, int sign) {
    std::lock_guard<std::mutex> lock(mu_);
    const auto key = std::make_tuple(h, w, sign);
    auto it = plans_.find(key);
    if (it != plans_.end()) return it->second;
    std::vector<fftw_complex> buf(static_cast<size_t>(h) * w);
    fftw_plan p = fftw_plan_dft_2d(h, w, buf.data(), buf.data(), sign,
                                   FFTW_ESTIMATE | FFTW_UNALIGNED);
    plans_.emplace(key, p);
    return p;
  }

private:
  std::mutex mu_;
  std::map<std::tuple<int, int, int>, fftw_plan> plans_;
};

PlanCache& plan_cache() {
  static PlanCache cache;
  return cache;
}

// dst[(i + dr) % h][(j + dc) % w] = src[i][j]
KGrid roll(const KGrid& src, int dr, int dc) {
  KGrid dst(src.height, src.width);
  for (int r = 0; r < src.height; ++r) {
    const int rr = (r + dr) % src.height;
    for (int c = 0; c < src.width; ++c)
      dst.at(rr, (c + dc) % src.width) = src.at(r, c);
  }
  return dst;
}

KGrid fftshift(const KGrid& g) { return roll(g, g.height / 2, g.width / 2); }
KGrid ifftshift(const KGrid& g) {
  return roll(g, (g.height + 1) / 2, (g.width + 1) / 2);
}

KGrid transform(const KGrid& in, int sign) {
  KGrid shifted = ifftshift(in);
  KGrid out(in.height, in.width);
  fftw_plan p = plan_cache().get(in.height, in.width, sign);
  fftw_execute_dft(p, reinterpret_cast<fftw_complex*>(shifted.data.data()),
                   reinterpret_cast<fftw_complex*>(out.data.data()));
  out = fftshift(out);
  const double scale = 1.0 / std::sqrt(static_cast<double>(in.height) * in.width);
  for (auto& v : out.data) v *= scale;
  return out;
}

}  // namespace

KGrid fft2c(const KGrid& img) { return transform(img, FFTW_FORWARD); }
KGrid ifft2c(const KGrid& k) { return transform(k, FFTW_BACKWARD); }

KGrid to_kgrid(const RealGrid& g) {
  KGrid k(g.height, g.width);
  for (size_t i = 0; i < g.size(); ++i) k.data[i] = {static_cast<double>(g.data[i]), 0.0};
  return k;
}

RealGrid magnitude(const KGrid& k) {
  RealGrid g(k.height, k.width);
  for (size_t i = 0; i < k.size(); ++i) g.data[i] = static_cast<float>(std::abs(k.data[i]));
  return g;
}

void validate(const MotionSpec& spec) {
  if (!(spec.kappa0 > 0.0 && spec.kappa0 <= M_PI))
    throw ConfigError("kappa0 must lie in (0, pi]");
  if (spec.delta_min > spec.delta_max || spec.alpha_min > spec.alpha_max ||
      spec.beta_min > spec.beta_max)
    throw ConfigError("motion spec intervals must be well-ordered");
}

MotionSpec random_phase_motion() {
  MotionSpec s;
  s.model = MotionModel::random_phase;
  s.delta_min = -37.0;
  s.delta_max = 37.0;
  return s;
}

MotionSpec sinusoidal_motion() {
  MotionSpec s;
  s.model = MotionModel::sinusoidal;
  s.delta_min = 0.0;
  s.delta_max = 37.0;
  return s;
}

PhaseShiftProfile sample_phase_profile(const MotionSpec& spec, int width, Rng& rng) {
  validate(spec);
  PhaseShiftProfile p;
  p.width = width;
  p.phi.assign(width, 0.0);
  if (spec.model == MotionModel::none) return p;

  double delta = 0.0, alpha = 0.0, beta = 0.0;
  if (spec.model == MotionModel::sinusoidal) {
    // one displacement trajectory per image
    delta = rng.uniform(spec.delta_min, spec.delta_max);
    alpha = rng.uniform(spec.alpha_min, spec.alpha_max);
    beta = rng.uniform(spec.beta_min, spec.beta_max);
  }
  for (int i = 0; i < width; ++i) {
    const double ky = kappa_y(i, width);
    if (std::abs(ky) <= spec.kappa0) continue;
    p.corrupted_lines.push_back(i);
    if (spec.model == MotionModel::random_phase) {
      p.phi[i] = ky * rng.uniform(spec.delta_min, spec.delta_max);  // redrawn per line
    } else {
      p.phi[i] = ky * delta * std::sin(alpha * ky + beta);
    }
  }
  return p;
}

KGrid apply_motion(const KGrid& k, const PhaseShiftProfile& profile) {
  if (profile.width != k.width)
    throw DataError(DataFault::shape_mismatch, "phase profile width does not match k-space");
  KGrid out = k;
  for (int c = 0; c < k.width; ++c) {
    if (profile.phi[c] == 0.0) continue;
    const std::complex<double> f = std::polar(1.0, -profile.phi[c]);
    for (int r = 0; r < k.height; ++r) out.at(r, c) *= f;
  }
  return out;
}

PhaseShiftProfile negate(const PhaseShiftProfile& p) {
  PhaseShiftProfile q = p;
  for (double& v : q.phi) v = -v;
  return q;
}

namespace {

// round half away from zero
int iround(double x) { return static_cast<int>(std::lround(x)); }

}  // namespace

Mask make_mask(int width, double R, double acs_fraction, Rng& rng) {
  if (width < 1) throw ConfigError("mask width must be positive");
  if (!(R >= 1.0)) throw ConfigError("acceleration factor must be >= 1");
  if (!(acs_fraction >= 0.0 && acs_fraction < 1.0))
    throw ConfigError("acs_fraction must lie in [0, 1)");

  const int target = std::clamp(iround(width / R), 1, width);
  const int acs = std::max(1, iround(acs_fraction * width));
  if (target < acs)
    throw ConfigError("mask target line count is below the ACS line count");

  Mask m;
  m.width = width;
  m.R = R;
  m.acs_count = acs;
  m.selected.assign(width, 0);

  const int acs_start = width / 2 - acs / 2;
  for (int i = 0; i < acs; ++i) m.selected[acs_start + i] = 1;

  // Gaussian-density draw without replacement (Efraimidis-Spirakis keys):
  // larger log(u)/w wins, w proportional to the density at the line.
  const double sd = width / 6.0;
  std::vector<std::pair<double, int>> keys;
  keys.reserve(width);
  for (int i = 0; i < width; ++i) {
    const double u = rng.uniform();
    if (m.selected[i]) continue;
    const double d = i - width / 2;
    const double w = std::exp(-d * d / (2.0 * sd * sd));
    keys.emplace_back(std::log(std::max(u, 1e-300)) / w, i);
  }
  std::sort(keys.begin(), keys.end(),
            [](const auto& a, const auto& b) { return a.first > b.first; });
  for (int n = 0; n < target - acs; ++n) m.selected[keys[n].second] = 1;
  return m;
}

KGrid apply_mask(const KGrid& k, const Mask& m) {
  if (m.width != k.width)
    throw DataError(DataFault::shape_mismatch, "mask width does not match k-space");
  KGrid out = k;
  for (int c = 0; c < k.width; ++c) {
    if (m.selected[c]) continue;
    for (int r = 0; r < k.height; ++r) out.at(r, c) = {0.0, 0.0};
  }
  return out;
}

RealGrid zero_filled_recon(const KGrid& k) { return magnitude(ifft2c(k)); }

RealGrid forward_model(const RealGrid& x, const DegradationParams& psi,
                       const MotionSpec& spec, const Mask& m, Rng& rng) {
  Rng degrade_rng = rng.substream(1);
  Rng motion_rng = rng.substream(2);
  RealGrid low = degrade(x, psi, degrade_rng);
  KGrid k = fft2c(to_kgrid(low));
  const PhaseShiftProfile profile = sample_phase_profile(spec, x.width, motion_rng);
  k = apply_motion(k, profile);
  k = apply_mask(k, m);
  return zero_filled_recon(k);
}

std::string mask_to_json(const Mask& m) {
  nlohmann::json j;
  j["width"] = m.width;
  j["R"] = m.R;
  j["acs_count"] = m.acs_count;
  std::vector<int> sel;
  for (int i = 0; i < m.width; ++i)
    if (m.selected[i]) sel.push_back(i);
  j["selected"] = sel;
  return j.dump();
}

Mask mask_from_json(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  Mask m;
  m.width = j.at("width").get<int>();
  m.R = j.at("R").get<double>();
  m.acs_count = j.at("acs_count").get<int>();
  m.selected.assign(m.width, 0);
  for (int i : j.at("selected").get<std::vector<int>>()) {
    if (i < 0 || i >= m.width)
      throw DataError(DataFault::shape_mismatch, "mask line index out of range");
    m.selected[i] = 1;
  }
  return m;
}

std::string profile_to_json(const PhaseShiftProfile& p) {
  nlohmann::json j;
  j["width"] = p.width;
  j["phi"] = p.phi;
  return j.dump();
}

PhaseShiftProfile profile_from_json(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  PhaseShiftProfile p;
  p.width = j.at("width").get<int>();
  p.phi = j.at("phi").get<std::vector<double>>();
  if (static_cast<int>(p.phi.size()) != p.width)
    throw DataError(DataFault::shape_mismatch, "phi length does not match width");
  for (int i = 0; i < p.width; ++i)
    if (p.phi[i] != 0.0) p.corrupted_lines.push_back(i);
  return p;
}

}  // namespace mriboost
