#pragma once

// Small dense minimisers used by the MLE. Problems here have 3 or 6
// unknowns, so everything is plain std::vector arithmetic.

#include <functional>
#include <vector>

namespace ssalt::opt {

// Returns f(x); writes the gradient into grad (same size as x). Non-finite
// values mark x as infeasible.
using Objective =
    std::function<double(const std::vector<double>& x, std::vector<double>& grad)>;

struct Result {
  std::vector<double> x;
  double value = 0.0;
  int iterations = 0;
  bool converged = false;
  bool stalled = false;  // line search could not make progress
};

struct BfgsOptions {
  int max_iterations = 500;
  double grad_tol = 1e-9;
};

Result minimize_bfgs(const Objective& f, std::vector<double> x0,
                     const BfgsOptions& options = {});

struct SimplexOptions {
  int max_iterations = 4000;
  double initial_step = 0.5;
  double f_tol = 1e-12;
};

// Derivative-free Nelder-Mead; only the function value of f is used.
Result minimize_simplex(const Objective& f, std::vector<double> x0,
                        const SimplexOptions& options = {});

}  // namespace ssalt::opt
