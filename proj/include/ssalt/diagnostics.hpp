#pragma once

// Convergence diagnostics for multi-chain MCMC output: rank-normalised
// split R-hat (max of bulk and folded) and bulk/tail effective sample size.

#include <Eigen/Dense>
#include <vector>

namespace ssalt {

// One column per chain, one row per draw.
using ChainMatrix = Eigen::MatrixXd;

struct QuantityDiagnostics {
  double rhat = 0.0;      // NaN when a chain has zero variance
  double ess_bulk = 0.0;  // NaN likewise
  double ess_tail = 0.0;
  bool degenerate = false;
};

QuantityDiagnostics diagnose_quantity(const ChainMatrix& draws);

// Classic (non-rank-normalised) split R-hat of the raw draws.
double split_rhat(const ChainMatrix& draws);

// Effective sample size of the draws as given (no splitting, no ranks).
double ess_basic(const ChainMatrix& draws);

// Biased autocovariance at lags 0..n-1 via zero-padded FFT.
std::vector<double> autocovariance(const Eigen::VectorXd& x);

// Autocorrelation at lags 1..max_lag.
std::vector<double> autocorrelation(const Eigen::VectorXd& x, int max_lag);

// Standard normal quantile.
double normal_quantile(double p);

}  // namespace ssalt
