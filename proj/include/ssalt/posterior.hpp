#pragma once

#include <Eigen/Dense>
#include <array>
#include <string>
#include <vector>

#include "ssalt/diagnostics.hpp"
#include "ssalt/model.hpp"
#include "ssalt/parallel.hpp"
#include "ssalt/prior.hpp"
#include "ssalt/rng.hpp"

namespace ssalt {

struct SamplerConfig {
  int n_chains = 3;
  int iter_warmup = 1000;
  int iter_sampling = 1000;
  double target_accept = 0.8;
  int max_depth = 10;
  bool adapt_metric = true;
  RngSeed seed{};

  // Settings of the conservative rerun.
  SamplerConfig escalated() const;
  // Throws ConfigError naming the offending field.
  void validate() const;
};

// Column layout of PosteriorDraws.
namespace col {
inline constexpr int kPhi = 0;        // 6 columns, PhiParams::to_array order
inline constexpr int kNatural = 6;    // a1, b1, beta1, a2, b2, beta2
inline constexpr int kLogTheta = 12;  // risk 1 at x1, x2; risk 2 at x1, x2
inline constexpr int kTheta = 16;     // same order
inline constexpr int kTp = 20;
inline constexpr int kLogTp = 21;
inline constexpr int kCount = 22;
}  // namespace col

const std::array<std::string, col::kCount>& quantity_names();

struct PosteriorDraws {
  Eigen::MatrixXd values;       // (n_chains * iter_sampling) x col::kCount
  std::vector<int> chain;       // chain id per row
  std::vector<double> lp;       // log target per row (unconstrained space)
  int n_chains = 0;
  int iter_sampling = 0;

  // Draws of one quantity arranged as iter_sampling x n_chains.
  ChainMatrix by_chain(int column) const;
};

struct Diagnostics {
  std::array<QuantityDiagnostics, col::kCount> quantity{};
  QuantityDiagnostics lp{};
  int n_divergent = 0;
  int n_depth_saturated = 0;
  std::vector<double> step_size;  // per chain

  double max_rhat() const;  // NaN if any quantity is degenerate
  double min_ess() const;   // min over bulk and tail
};

Diagnostics diagnose(const PosteriorDraws& draws);

// Unnormalised log posterior over u = log(phi) (Jacobian included) and its
// gradient. data may be null, in which case the target is the prior.
double log_target_unconstrained(const Eigen::VectorXd& u, const Dataset* data,
                                const GammaPrior& prior, Eigen::VectorXd* grad);

struct PosteriorRun {
  PosteriorDraws draws;
  Diagnostics diagnostics;
};

// design supplies x1 for the derived theta columns when data is null.
PosteriorRun sample_posterior(const Dataset* data, const DesignSpec& design,
                              const GammaPrior& prior, double p,
                              const SamplerConfig& config,
                              Execution exec = {});

enum class FitStatus { Ok, Refitted, Discarded };
const char* status_name(FitStatus s);

// True when the run fails any gate: divergences, R-hat above 1.01,
// non-finite or huge posterior sd, or ESS below 100 per chain.
bool needs_refit(const PosteriorRun& run, int n_chains);

struct RefitResult {
  PosteriorRun run;
  FitStatus status = FitStatus::Ok;
};

RefitResult sample_with_refit(const Dataset* data, const DesignSpec& design,
                              const GammaPrior& prior, double p,
                              const SamplerConfig& config, Execution exec = {});

struct SummaryRow {
  std::string name;
  double mean, median, sd, mad, q5, q95, rhat, ess_bulk, ess_tail;
};

// One row per quantity, preceded by the log target row "lp__".
std::vector<SummaryRow> summarise(const PosteriorDraws& draws,
                                  const Diagnostics& diag);

}  // namespace ssalt
