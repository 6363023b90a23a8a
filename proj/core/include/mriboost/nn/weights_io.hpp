#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "mriboost/errors.hpp"
#include "mriboost/nn/discriminator.hpp"
#include "mriboost/nn/generator.hpp"

namespace mriboost::nn {

/// WTS1 container: "WTS1" magic, u32le manifest length, JSON manifest
/// [{name, dims}, ..., {"config": {...}}], then all scalars as f32le in
/// manifest order.
struct NamedTensorF {
  std::string name;
  std::vector<int> dims;
  std::vector<float> data;
};

struct WeightsFile {
  std::vector<NamedTensorF> tensors;
  nlohmann::json config;
};

void save_weights_file(const WeightsFile& wf, const std::string& path);
WeightsFile load_weights_file(const std::string& path);

template <typename T>
nlohmann::json generator_config_json(const GeneratorConfig& cfg) {
  return {{"type", "generator"},
          {"stages", cfg.stages},
          {"base_channels", cfg.base_channels},
          {"norm_groups", cfg.norm_groups},
          {"in_channels", cfg.in_channels},
          {"out_channels", cfg.out_channels}};
}

template <typename T>
WeightsFile pack_model(std::vector<ParamRef<T>> params, nlohmann::json config) {
  WeightsFile wf;
  wf.config = std::move(config);
  for (auto& p : params) {
    NamedTensorF t;
    t.name = p.name;
    t.dims = {p.value->n, p.value->c, p.value->h, p.value->w};
    t.data.reserve(p.value->size());
    for (T v : p.value->v) t.data.push_back(static_cast<float>(v));
    wf.tensors.push_back(std::move(t));
  }
  return wf;
}

template <typename T>
void unpack_model(const WeightsFile& wf, std::vector<ParamRef<T>> params) {
  if (wf.tensors.size() != params.size())
    throw DataError(DataFault::shape_mismatch, "weights manifest tensor count mismatch");
  for (size_t i = 0; i < params.size(); ++i) {
    const auto& t = wf.tensors[i];
    auto& p = params[i];
    const std::vector<int> dims = {p.value->n, p.value->c, p.value->h, p.value->w};
    if (t.name != p.name || t.dims != dims)
      throw DataError(DataFault::shape_mismatch,
                      "weights manifest mismatch at tensor " + t.name);
    for (size_t j = 0; j < t.data.size(); ++j) p.value->v[j] = static_cast<T>(t.data[j]);
  }
}

template <typename T>
void save_generator(Generator<T>& g, const std::string& path,
                    nlohmann::json extra = nlohmann::json::object()) {
  nlohmann::json cfg = generator_config_json<T>(g.cfg);
  for (auto& [k, v] : extra.items()) cfg[k] = v;
  save_weights_file(pack_model(g.params(), cfg), path);
}

GeneratorConfig generator_config_from_json(const nlohmann::json& cfg);

template <typename T>
Generator<T> load_generator(const std::string& path, nlohmann::json* config_out = nullptr) {
  WeightsFile wf = load_weights_file(path);
  if (wf.config.value("type", "") != "generator")
    throw DataError(DataFault::bad_magic, "weights file does not hold a generator");
  Generator<T> g;
  g.init(generator_config_from_json(wf.config), Rng(0));
  unpack_model(wf, g.params());
  if (config_out) *config_out = wf.config;
  return g;
}

template <typename T>
void save_discriminator(Discriminator<T>& d, const std::string& path) {
  nlohmann::json cfg = {{"type", "discriminator"},
                        {"blocks", d.cfg.blocks},
                        {"base_channels", d.cfg.base_channels},
                        {"leaky_slope", d.cfg.leaky_slope},
                        {"spectral_norm", d.cfg.spectral_norm},
                        {"power_iterations", d.cfg.power_iterations},
                        {"in_channels", d.cfg.in_channels}};
  save_weights_file(pack_model(d.params(), cfg), path);
}

template <typename T>
Discriminator<T> load_discriminator(const std::string& path) {
  WeightsFile wf = load_weights_file(path);
  if (wf.config.value("type", "") != "discriminator")
    throw DataError(DataFault::bad_magic, "weights file does not hold a discriminator");
  DiscriminatorConfig cfg;
  cfg.blocks = wf.config.at("blocks").get<int>();
  cfg.base_channels = wf.config.at("base_channels").get<int>();
  cfg.leaky_slope = wf.config.at("leaky_slope").get<double>();
  cfg.spectral_norm = wf.config.at("spectral_norm").get<bool>();
  cfg.power_iterations = wf.config.at("power_iterations").get<int>();
  cfg.in_channels = wf.config.at("in_channels").get<int>();
  Discriminator<T> d;
  d.init(cfg, Rng(0));
  unpack_model(wf, d.params());
  return d;
}

}  // namespace mriboost::nn
