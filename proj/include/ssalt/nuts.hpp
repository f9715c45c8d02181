#pragma once

// No-U-turn Hamiltonian Monte Carlo on an unconstrained real vector space.
// Multinomial trajectory sampling with the generalised no-U-turn check,
// dual-averaging step size adaptation and an optional windowed diagonal
// metric adaptation during warmup.

#include <Eigen/Dense>
#include <functional>
#include <vector>

#include "ssalt/rng.hpp"

namespace ssalt {

// Returns log density at x (may be -inf or NaN outside the support) and
// writes its gradient.
using LogDensity =
    std::function<double(const Eigen::VectorXd& x, Eigen::VectorXd& grad)>;

struct NutsSettings {
  int iter_warmup = 1000;
  int iter_sampling = 1000;
  double target_accept = 0.8;
  int max_depth = 10;
  bool adapt_metric = true;
  double max_energy_error = 1000.0;  // larger error marks a divergence
};

struct ChainResult {
  Eigen::MatrixXd draws;        // iter_sampling x dim
  std::vector<double> log_density;
  std::vector<double> accept_stat;
  std::vector<int> tree_depth;
  std::vector<char> divergent;
  double step_size = 0.0;
  Eigen::VectorXd inv_metric;
  int n_divergent = 0;          // sampling phase only
  int n_depth_saturated = 0;    // sampling phase only
  int n_warmup_divergent = 0;
};

ChainResult run_nuts_chain(const LogDensity& target, Eigen::VectorXd init,
                           const NutsSettings& settings, CounterRng& rng);

}  // namespace ssalt
