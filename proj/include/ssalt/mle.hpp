#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "ssalt/errors.hpp"
#include "ssalt/model.hpp"
#include "ssalt/parallel.hpp"
#include "ssalt/rng.hpp"
#include "ssalt/simulate.hpp"

namespace ssalt {

struct MleFit {
  ModelParams params;
  double loglik = 0.0;
  bool converged = false;  // implies max |d loglik / d param| < 1e-4
  int iterations = 0;
};

struct MleOptions {
  // Optimise all six parameters at once instead of the two independent
  // three-parameter blocks. Only useful for checking block separability.
  bool joint = false;
  int max_iterations = 500;
};

// Throws NonIdentifiable if any (cause, phase) cell has no failures.
void require_identifiable(const Dataset& data);

// Exponential method-of-moments start: per cause and phase, theta is the
// phase's total time on test over the cell's failure count; beta = 1.
ModelParams default_mle_init(const Dataset& data);

MleFit fit_mle(const Dataset& data, std::optional<ModelParams> init = {},
               const MleOptions& options = {});

// EDF statistics at the failure times. F_n(t) = #{failures <= t} / n; KS
// takes both one-sided sups at each jump, CvM = mean squared difference at
// the jump points.
struct EdfStatistics {
  double ks = 0.0;
  double cvm = 0.0;
};

EdfStatistics edf_statistics(const Dataset& data, const ModelParams& params);

struct EdfPoint {
  double time;
  double empirical;
  double fitted;
};

// Pointwise (t, F_n(t), F(t)) at every failure time, ascending.
std::vector<EdfPoint> edf_curve(const Dataset& data, const ModelParams& params);

struct GofResult {
  double ks_stat = 0.0;
  double cvm_stat = 0.0;
  double ks_pvalue = 1.0;
  double cvm_pvalue = 1.0;
  int n_boot = 0;
  int n_regenerated = 0;  // replicates redrawn because they could not be fit
};

GofResult gof_bootstrap(const Dataset& data, const MleFit& fit, int n_boot,
                        RngSeed seed, Execution exec = {});

// Add-one bootstrap p-value.
double bootstrap_pvalue(double observed, const std::vector<double>& boot);

// Runs fn on n_reps datasets simulated from truth under design. A replicate
// whose fn throws NonIdentifiable (or SolverError) is redrawn from the next
// sub-stream of its slot; NonIdentifiable propagates after 10 * n_reps
// failed draws for one slot. Slot r, attempt k uses seed.child({r, k}).
template <class R, class Fn>
std::vector<R> bootstrap_replicates(const ModelParams& truth,
                                    const DesignSpec& design, int n_reps,
                                    RngSeed seed, Execution exec, Fn&& fn,
                                    int* n_regenerated = nullptr) {
  std::vector<R> out(static_cast<std::size_t>(n_reps));
  std::vector<int> redraws(static_cast<std::size_t>(n_reps), 0);
  const int cap = 10 * n_reps;
  for_each_index(out.size(), exec, [&](std::size_t r) {
    for (int k = 0;; ++k) {
      if (k >= cap) {
        throw NonIdentifiable("bootstrap: no fittable replicate after " +
                              std::to_string(cap) + " draws");
      }
      const Dataset sample = simulate_dataset(
          truth, design,
          seed.child({static_cast<std::uint64_t>(r),
                      static_cast<std::uint64_t>(k)}));
      try {
        out[r] = fn(sample);
        redraws[r] = k;
        return;
      } catch (const NonIdentifiable&) {
      } catch (const SolverError&) {
      }
    }
  });
  if (n_regenerated) {
    *n_regenerated = 0;
    for (int k : redraws) *n_regenerated += k;
  }
  return out;
}

}  // namespace ssalt
