#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "mriboost/bootstrap.hpp"
#include "mriboost/metrics.hpp"
#include "mriboost/phantom.hpp"
#include "mriboost/train.hpp"

namespace mriboost {

enum class ExperimentKind { simulation, ablation, r_sweep };

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::simulation;
  std::string output_dir = "out";
  PhantomConfig phantoms;   // count = clean training grids; equal-sized
                            // held-out batches feed the artifact domain and
                            // the test set
  int test_count = 20;
  TrainConfig train;
  InferenceConfig inference;
  std::vector<double> r_sweep = {1.5, 2.0, 3.0, 4.0};
  std::string weights_path;  // reuse a trained generator instead of training
  int panel_count = 4;       // PNG panels emitted per run
};

ExperimentConfig experiment_config_from_json(const nlohmann::json& j);
nlohmann::json experiment_config_to_json(const ExperimentConfig& cfg);

/// FNV-1a over the canonical JSON dump; stamped into every report so mixed
/// tables are detectable.
std::string config_fingerprint(const ExperimentConfig& cfg);

struct MetricRow {
  std::string id;       // per-image id or "mean"
  std::string variant;  // method / ablation cell / R value
  double input_psnr = 0.0, input_ssim = 0.0;
  double out_psnr = 0.0, out_ssim = 0.0;
};

struct MetricReport {
  std::vector<MetricRow> rows;
  std::string fingerprint;
  std::string to_csv() const;
};

MetricReport run_simulation_study(const ExperimentConfig& cfg);
MetricReport run_ablation(const ExperimentConfig& cfg);
MetricReport run_r_sweep(const ExperimentConfig& cfg);

MetricReport run_experiment(const ExperimentConfig& cfg);

}  // namespace mriboost
