#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "mriboost/degrade.hpp"
#include "mriboost/grid.hpp"
#include "mriboost/rng.hpp"

namespace mriboost {

/// Per-phase-encoding-line boolean selection with a contiguous fully sampled
/// ACS block at the center.
struct Mask {
  int width = 0;
  std::vector<std::uint8_t> selected;  // one flag per phase-encoding line
  double R = 1.0;
  int acs_count = 0;

  int selected_count() const {
    int n = 0;
    for (auto s : selected) n += s ? 1 : 0;
    return n;
  }
};

enum class MotionModel { none, random_phase, sinusoidal };

/// Phase-corruption model along the phase-encoding axis. Displacement is in
/// pixels, so kappa_y * delta is the linear phase of a delta-pixel shift.
struct MotionSpec {
  MotionModel model = MotionModel::none;
  double kappa0 = M_PI / 10.0;  // lines with |kappa_y| <= kappa0 stay clean
  double delta_min = -37.0;     // random_phase default
  double delta_max = 37.0;
  double alpha_min = 0.1;  // sinusoidal frequency
  double alpha_max = 5.0;
  double beta_min = 0.0;  // sinusoidal phase, radians
  double beta_max = M_PI / 4.0;
};

void validate(const MotionSpec& spec);

/// Presets matching the two simulation regimes: per-line random displacement
/// and once-per-image sinusoidal (breathing-type) displacement.
MotionSpec random_phase_motion();
MotionSpec sinusoidal_motion();

struct PhaseShiftProfile {
  int width = 0;
  std::vector<double> phi;          // radians per phase-encoding line
  std::vector<int> corrupted_lines; // indices where phi may be nonzero
};

/// kappa_y for line i, normalized to [-pi, pi) radians/pixel.
inline double kappa_y(int i, int width) {
  return 2.0 * M_PI * (i - width / 2) / static_cast<double>(width);
}

/// Unitary centered 2D DFT (DC at (H/2, W/2)); Parseval holds exactly up to
/// floating-point rounding.
KGrid fft2c(const KGrid& img);
KGrid ifft2c(const KGrid& k);

KGrid to_kgrid(const RealGrid& g);
RealGrid magnitude(const KGrid& k);

PhaseShiftProfile sample_phase_profile(const MotionSpec& spec, int width, Rng& rng);

/// Multiply every sample on line i by exp(-i * phi(i)); lines with phi == 0
/// are passed through untouched so clean lines stay bit-identical.
KGrid apply_motion(const KGrid& k, const PhaseShiftProfile& profile);

/// Negated copy, for inverting apply_motion.
PhaseShiftProfile negate(const PhaseShiftProfile& p);

/// Variable-density mask: round(width/R) lines total, the ACS block always
/// selected, the rest drawn without replacement with Gaussian density
/// (std = width/6) centered at DC.
Mask make_mask(int width, double R, double acs_fraction, Rng& rng);

KGrid apply_mask(const KGrid& k, const Mask& m);

/// The composite forward model: magnitude of
/// ifft2c(mask(motion(fft2c(degrade(x))))); the aliased network input.
RealGrid forward_model(const RealGrid& x, const DegradationParams& psi,
                       const MotionSpec& spec, const Mask& m, Rng& rng);

/// Elementwise magnitude of the inverse transform.
RealGrid zero_filled_recon(const KGrid& k);

std::string mask_to_json(const Mask& m);
Mask mask_from_json(const std::string& text);
std::string profile_to_json(const PhaseShiftProfile& p);
PhaseShiftProfile profile_from_json(const std::string& text);

}  // namespace mriboost
