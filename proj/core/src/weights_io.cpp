#include "mriboost/nn/weights_io.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>

namespace mriboost::nn {

namespace {
constexpr char kMagic[4] = {'W', 'T', 'S', '1'};
}

void save_weights_file(const WeightsFile& wf, const std::string& path) {
  nlohmann::json manifest = nlohmann::json::array();
  for (const auto& t : wf.tensors) {
    for (float v : t.data)
      if (!std::isfinite(v))
        throw DataError(DataFault::non_finite, "refusing to save non-finite weight " + t.name);
    manifest.push_back({{"name", t.name}, {"dims", t.dims}});
  }
  manifest.push_back({{"config", wf.config}});
  const std::string mtext = manifest.dump();

  std::FILE* f = std::fopen(path.c_str(), "wb");
  if (!f) throw DataError(DataFault::io, "cannot write weights file: " + path);
  bool ok = std::fwrite(kMagic, 1, 4, f) == 4;
  const std::uint32_t mlen = static_cast<std::uint32_t>(mtext.size());
  unsigned char lenb[4] = {static_cast<unsigned char>(mlen & 0xff),
                           static_cast<unsigned char>((mlen >> 8) & 0xff),
                           static_cast<unsigned char>((mlen >> 16) & 0xff),
                           static_cast<unsigned char>((mlen >> 24) & 0xff)};
  ok = ok && std::fwrite(lenb, 1, 4, f) == 4;
  ok = ok && std::fwrite(mtext.data(), 1, mtext.size(), f) == mtext.size();
  for (const auto& t : wf.tensors)
    ok = ok && std::fwrite(t.data.data(), 4, t.data.size(), f) == t.data.size();
  std::fclose(f);
  if (!ok) throw DataError(DataFault::io, "short write to " + path);
}

WeightsFile load_weights_file(const std::string& path) {
  std::FILE* f = std::fopen(path.c_str(), "rb");
  if (!f) throw DataError(DataFault::missing_file, "cannot open weights file: " + path);
  struct Closer {
    std::FILE* f;
    ~Closer() { std::fclose(f); }
  } closer{f};

  char magic[4];
  unsigned char lenb[4];
  if (std::fread(magic, 1, 4, f) != 4 || std::fread(lenb, 1, 4, f) != 4)
    throw DataError(DataFault::truncated, "truncated WTS1 header in " + path);
  if (std::memcmp(magic, kMagic, 4) != 0)
    throw DataError(DataFault::bad_magic, "bad WTS1 magic in " + path);
  const std::uint32_t mlen = static_cast<std::uint32_t>(lenb[0]) | (lenb[1] << 8) |
                             (lenb[2] << 16) | (static_cast<std::uint32_t>(lenb[3]) << 24);
  std::string mtext(mlen, '\0');
  if (std::fread(mtext.data(), 1, mlen, f) != mlen)
    throw DataError(DataFault::truncated, "truncated WTS1 manifest in " + path);

  nlohmann::json manifest;
  try {
    manifest = nlohmann::json::parse(mtext);
  } catch (const nlohmann::json::exception& e) {
    throw DataError(DataFault::bad_magic, std::string("bad WTS1 manifest: ") + e.what());
  }
  if (!manifest.is_array() || manifest.empty() || !manifest.back().contains("config"))
    throw DataError(DataFault::bad_magic, "WTS1 manifest missing trailing config");

  WeightsFile wf;
  wf.config = manifest.back().at("config");
  for (size_t i = 0; i + 1 < manifest.size(); ++i) {
    NamedTensorF t;
    t.name = manifest[i].at("name").get<std::string>();
    t.dims = manifest[i].at("dims").get<std::vector<int>>();
    size_t numel = 1;
    for (int d : t.dims) {
      if (d < 0) throw DataError(DataFault::shape_mismatch, "negative dim in manifest");
      numel *= static_cast<size_t>(d);
    }
    t.data.resize(numel);
    if (std::fread(t.data.data(), 4, numel, f) != numel)
      throw DataError(DataFault::truncated, "truncated WTS1 payload in " + path);
    for (float v : t.data)
      if (!std::isfinite(v))
        throw DataError(DataFault::non_finite, "non-finite weight in " + path);
    wf.tensors.push_back(std::move(t));
  }
  return wf;
}

GeneratorConfig generator_config_from_json(const nlohmann::json& cfg) {
  GeneratorConfig g;
  g.stages = cfg.at("stages").get<int>();
  g.base_channels = cfg.at("base_channels").get<int>();
  g.norm_groups = cfg.at("norm_groups").get<int>();
  g.in_channels = cfg.at("in_channels").get<int>();
  g.out_channels = cfg.at("out_channels").get<int>();
  return g;
}

}  // namespace mriboost::nn
