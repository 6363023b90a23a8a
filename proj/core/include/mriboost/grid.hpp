#pragma once

#include <complex>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace mriboost {

/// 2D real-valued image (magnitude image, ADC map, or phantom), row-major.
/// Stored as 32-bit floats, matching the on-disk GRD1 payload so that file
/// roundtrips are bit-exact for every finite grid.
struct RealGrid {
  int height = 0;
  int width = 0;
  std::vector<float> data;

  RealGrid() = default;
  RealGrid(int h, int w) : height(h), width(w), data(static_cast<size_t>(h) * w, 0.0f) {}
  RealGrid(int h, int w, std::vector<float> d) : height(h), width(w), data(std::move(d)) {}

  float& at(int r, int c) { return data[static_cast<size_t>(r) * width + c]; }
  float at(int r, int c) const { return data[static_cast<size_t>(r) * width + c]; }
  size_t size() const { return data.size(); }

  bool operator==(const RealGrid& o) const = default;
};

/// 2D complex k-space array, row-major, DC at (H/2, W/2). Axis 1 (columns)
/// is the phase-encoding direction, axis 0 the frequency-encoding direction.
struct KGrid {
  int height = 0;
  int width = 0;
  std::vector<std::complex<double>> data;

  KGrid() = default;
  KGrid(int h, int w) : height(h), width(w), data(static_cast<size_t>(h) * w) {}

  std::complex<double>& at(int r, int c) { return data[static_cast<size_t>(r) * width + c]; }
  const std::complex<double>& at(int r, int c) const {
    return data[static_cast<size_t>(r) * width + c];
  }
  size_t size() const { return data.size(); }

  bool operator==(const KGrid& o) const = default;
};

/// GRD1 file: "GRD1" magic, u32le height, u32le width, then h*w f32le
/// row-major samples. Errors are reported distinctly via DataError::fault().
RealGrid load_grid(const std::string& path);
void save_grid(const RealGrid& g, const std::string& path);

/// 8-bit grayscale PNG, min-max normalized per image; a constant grid maps
/// to mid-gray (128).
void save_png_preview(const RealGrid& g, const std::string& path);

/// Per-slice normalization by the population standard deviation. Returns the
/// normalized grid and the scale so the caller can invert. Zero-variance
/// input is a degenerate-input error.
std::pair<RealGrid, double> normalize_by_std(const RealGrid& g);

double grid_mean(const RealGrid& g);
double grid_stddev(const RealGrid& g);  // population

}  // namespace mriboost
