#pragma once

// JSON run configuration shared by the CLI commands.
//
//   {
//     "seed": 2026,
//     "data":   {"path": "...", "frame": {"T0":..,"T1":..,"T2":..},
//                "design": {"tau":..,"tc":..,"n":..}},
//     "prior":  {"q": 0.01, "flavour": "I",
//                "bootstrap": {"mean": [6], "se": [6]}}
//               or {"q": .., "alpha": [6], "lambda": [6]},
//     "sampler": {"n_chains":3, "iter_warmup":1000, "iter_sampling":1000,
//                 "target_accept":0.8, "max_depth":10, "adapt_metric":true},
//     "gof":     {"n_boot": 1000},
//     "elicit":  {"n_reps": 1000},
//     "diagnose": {"p": 0.10, "acf_lags": 30},
//     "plan":    {"frame": {..}, "design": {"tc":6, "n":35}, "p": 0.10,
//                 "replicates": 1000, "tau_grid": {"lo":..,"hi":..,"m":..},
//                 "x1_grid": [..], "truth": [6],
//                 "synthetic": {"c1": [..], "c2": [..]}},
//     "simulate": {"params": [6]}
//   }
//
// Relative paths are resolved against the directory of the config file.

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "ssalt/design.hpp"
#include "ssalt/prior.hpp"

namespace ssalt {

struct DataBlock {
  std::filesystem::path path;
  DesignSpec design{StressFrame::from_kelvin(293.0, 293.0, 353.0), 5.0, 6.0, 35};
};

struct PlanBlock {
  StressFrame frame = StressFrame::from_kelvin(293.0, 320.2136, 353.0);
  double tc = 6.0;
  int n = 35;
  double p = 0.10;
  int replicates = 1000;
  TauGrid tau_grid{};
  std::vector<double> x1_grid{0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
  std::optional<ModelParams> truth;  // default: MLE of the data block
  std::optional<std::vector<double>> synthetic_c1;
  std::optional<std::vector<double>> synthetic_c2;

  DesignSpec base_design() const {
    return {frame, 0.5 * (tau_grid.lo + tau_grid.hi), tc, n};
  }
};

struct RunConfig {
  std::uint64_t seed = 2026;
  int threads = 0;
  std::optional<DataBlock> data;
  std::optional<GammaPrior> prior;
  SamplerConfig sampler{};
  int gof_n_boot = 1000;
  int elicit_n_reps = 1000;
  double diagnose_p = 0.10;
  int acf_lags = 30;
  PlanBlock plan{};
  std::optional<ModelParams> simulate_params;

  // Throws ConfigError("config", ...) when a block a command needs is absent.
  const DataBlock& require_data() const;
  const GammaPrior& require_prior() const;
};

// Throws ConfigError naming the module whose precondition failed.
RunConfig parse_config(const std::string& json_text,
                       const std::filesystem::path& base_dir = {});
RunConfig load_config(const std::filesystem::path& path);

}  // namespace ssalt
