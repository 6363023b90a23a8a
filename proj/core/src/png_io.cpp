#include <zlib.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <memory>
#include <vector>

#include "mriboost/errors.hpp"
#include "mriboost/grid.hpp"

namespace mriboost {

namespace {

void put_u32be(std::uint32_t v, std::vector<unsigned char>& out) {
  out.push_back(static_cast<unsigned char>((v >> 24) & 0xff));
  out.push_back(static_cast<unsigned char>((v >> 16) & 0xff));
  out.push_back(static_cast<unsigned char>((v >> 8) & 0xff));
  out.push_back(static_cast<unsigned char>(v & 0xff));
}

void append_chunk(const char type[4], const std::vector<unsigned char>& payload,
                  std::vector<unsigned char>& out) {
  put_u32be(static_cast<std::uint32_t>(payload.size()), out);
  const size_t type_at = out.size();
  out.insert(out.end(), type, type + 4);
  out.insert(out.end(), payload.begin(), payload.end());
  const std::uint32_t crc = static_cast<std::uint32_t>(
      ::crc32(0, out.data() + type_at, static_cast<uInt>(4 + payload.size())));
  put_u32be(crc, out);
}

}  // namespace

void save_png_preview(const RealGrid& g, const std::string& path) {
  const int h = g.height, w = g.width;
  float lo = g.data.empty() ? 0.0f : g.data[0];
  float hi = lo;
  for (float v : g.data) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }

  // Filter byte 0 per scanline, then 8-bit gray samples.
  std::vector<unsigned char> raw;
  raw.reserve(static_cast<size_t>(h) * (w + 1));
  const double range = static_cast<double>(hi) - static_cast<double>(lo);
  for (int r = 0; r < h; ++r) {
    raw.push_back(0);
    for (int c = 0; c < w; ++c) {
      unsigned char px = 128;  // constant grid maps to mid-gray
      if (range > 0.0) {
        const double t = (g.at(r, c) - lo) / range;
        px = static_cast<unsigned char>(std::lround(255.0 * t));
      }
      raw.push_back(px);
    }
  }

  uLongf zlen = compressBound(static_cast<uLong>(raw.size()));
  std::vector<unsigned char> zdata(zlen);
  if (compress2(zdata.data(), &zlen, raw.data(), static_cast<uLong>(raw.size()), 9) != Z_OK)
    throw DataError(DataFault::io, "PNG deflate failed for " + path);
  zdata.resize(zlen);

  std::vector<unsigned char> png = {0x89, 'P', 'N', 'G', 0x0d, 0x0a, 0x1a, 0x0a};
  std::vector<unsigned char> ihdr;
  put_u32be(static_cast<std::uint32_t>(w), ihdr);
  put_u32be(static_cast<std::uint32_t>(h), ihdr);
  ihdr.push_back(8);  // bit depth
  ihdr.push_back(0);  // grayscale
  ihdr.push_back(0);  // deflate
  ihdr.push_back(0);  // filter method
  ihdr.push_back(0);  // no interlace
  append_chunk("IHDR", ihdr, png);
  append_chunk("IDAT", zdata, png);
  append_chunk("IEND", {}, png);

  std::FILE* f = std::fopen(path.c_str(), "wb");
  if (!f) throw DataError(DataFault::io, "cannot write PNG file: " + path);
  const size_t written = std::fwrite(png.data(), 1, png.size(), f);
  std::fclose(f);
  if (written != png.size()) throw DataError(DataFault::io, "short PNG write to " + path);
}

}  // namespace mriboost
