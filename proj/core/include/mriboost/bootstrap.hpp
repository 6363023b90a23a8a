#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "mriboost/degrade.hpp"
#include "mriboost/kspace.hpp"
#include "mriboost/nn/generator.hpp"

namespace mriboost {

/// Single-image map used inside the bootstrap aggregate.
class Reconstructor {
public:
  virtual ~Reconstructor() = default;
  virtual RealGrid reconstruct(const RealGrid& img) = 0;
};

class IdentityReconstructor : public Reconstructor {
public:
  RealGrid reconstruct(const RealGrid& img) override { return img; }
};

/// Frequency-domain Wiener deconvolution H* / (|H|^2 + 1/snr) against the
/// transfer function of the Gaussian blur kernel; requires known psi.
class WienerReconstructor : public Reconstructor {
public:
  WienerReconstructor(DegradationParams psi, double snr_param)
      : psi_(psi), snr_(snr_param) {}
  RealGrid reconstruct(const RealGrid& img) override;

private:
  DegradationParams psi_;
  double snr_;
};

/// Wraps a trained generator; reflect-pads to the next multiple of 2^stages
/// and crops the output back.
class GeneratorReconstructor : public Reconstructor {
public:
  explicit GeneratorReconstructor(nn::Generator<float> g) : g_(std::move(g)) {}
  RealGrid reconstruct(const RealGrid& img) override;

private:
  nn::Generator<float> g_;
};

struct InferenceConfig {
  int N = 15;
  double R = 1.5;
  std::vector<double> weights;  // empty = uniform 1/N
  std::uint64_t mask_seed = 0;
  double acs_fraction = 0.06;
  std::optional<double> max_R;  // training maximum; R above it is rejected
};

void validate(const InferenceConfig& cfg);

/// Subsample-and-aggregate: re-transform the magnitude image to k-space,
/// draw N independent masks at factor R, reconstruct each zero-filled image
/// and return the weighted sum (fixed index order, bit-reproducible).
RealGrid bootstrap_reconstruct(const RealGrid& y_img, Reconstructor& recon,
                               const InferenceConfig& cfg, Rng rng);

RealGrid oracle_wiener_recon(const RealGrid& y_img, const DegradationParams& psi,
                             double snr_param);

/// Full inference path: normalize by std, bootstrap with the trained
/// generator, rescale back. Works for DW images and ADC maps alike.
RealGrid enhance_image(const RealGrid& input, const std::string& weights_path,
                       const InferenceConfig& cfg);

/// Reflect padding helpers (exposed for tests).
RealGrid pad_reflect_to_multiple(const RealGrid& g, int multiple, int* pad_h, int* pad_w);
RealGrid crop(const RealGrid& g, int height, int width);

}  // namespace mriboost
