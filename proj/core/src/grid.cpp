#include "mriboost/grid.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <memory>

#include "mriboost/errors.hpp"

namespace mriboost {

namespace {

constexpr char kMagic[4] = {'G', 'R', 'D', '1'};

struct FileCloser {
  void operator()(std::FILE* f) const {
    if (f) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

std::uint32_t read_u32le(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

void write_u32le(std::uint32_t v, unsigned char* p) {
  p[0] = static_cast<unsigned char>(v & 0xff);
  p[1] = static_cast<unsigned char>((v >> 8) & 0xff);
  p[2] = static_cast<unsigned char>((v >> 16) & 0xff);
  p[3] = static_cast<unsigned char>((v >> 24) & 0xff);
}

}  // namespace

RealGrid load_grid(const std::string& path) {
  FilePtr f(std::fopen(path.c_str(), "rb"));
  if (!f) throw DataError(DataFault::missing_file, "cannot open grid file: " + path);

  unsigned char header[12];
  if (std::fread(header, 1, sizeof(header), f.get()) != sizeof(header))
    throw DataError(DataFault::truncated, "truncated GRD1 header: " + path);
  if (std::memcmp(header, kMagic, 4) != 0)
    throw DataError(DataFault::bad_magic, "bad GRD1 magic in " + path);

  const std::uint32_t h = read_u32le(header + 4);
  const std::uint32_t w = read_u32le(header + 8);
  if (h == 0 || w == 0)
    throw DataError(DataFault::shape_mismatch, "zero-sized grid in " + path);

  RealGrid g(static_cast<int>(h), static_cast<int>(w));
  static_assert(sizeof(float) == 4);
  if (std::fread(g.data.data(), 4, g.size(), f.get()) != g.size())
    throw DataError(DataFault::truncated, "truncated GRD1 payload in " + path);
  for (float v : g.data) {
    if (!std::isfinite(v))
      throw DataError(DataFault::non_finite, "non-finite value in " + path);
  }
  return g;
}

void save_grid(const RealGrid& g, const std::string& path) {
  FilePtr f(std::fopen(path.c_str(), "wb"));
  if (!f) throw DataError(DataFault::io, "cannot write grid file: " + path);

  unsigned char header[12];
  std::memcpy(header, kMagic, 4);
  write_u32le(static_cast<std::uint32_t>(g.height), header + 4);
  write_u32le(static_cast<std::uint32_t>(g.width), header + 8);
  if (std::fwrite(header, 1, sizeof(header), f.get()) != sizeof(header) ||
      std::fwrite(g.data.data(), 4, g.size(), f.get()) != g.size())
    throw DataError(DataFault::io, "short write to " + path);
}

double grid_mean(const RealGrid& g) {
  double s = 0.0;
  for (float v : g.data) s += v;
  return s / static_cast<double>(g.size());
}

double grid_stddev(const RealGrid& g) {
  const double m = grid_mean(g);
  double s = 0.0;
  for (float v : g.data) {
    const double d = v - m;
    s += d * d;
  }
  return std::sqrt(s / static_cast<double>(g.size()));
}

std::pair<RealGrid, double> normalize_by_std(const RealGrid& g) {
  const double sd = grid_stddev(g);
  if (!(sd > 0.0))
    throw DataError(DataFault::non_finite, "zero-variance grid cannot be normalized");
  RealGrid out(g.height, g.width);
  for (size_t i = 0; i < g.size(); ++i)
    out.data[i] = static_cast<float>(g.data[i] / sd);
  return {out, sd};
}

}  // namespace mriboost
