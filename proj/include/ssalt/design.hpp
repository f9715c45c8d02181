#pragma once

// Preposterior design criteria and grid-plus-smoothing optimal design search.
//   C1 = E_data[ Var(t_p(x0) | data) ]
//   C2 = E_data[ Var(log t_p(x0) | data) ]

#include <array>
#include <functional>
#include <vector>

#include "ssalt/posterior.hpp"

namespace ssalt {

struct CriterionPoint {
  double x1 = 0.0;
  double tau = 0.0;
  double c1_raw = 0.0;  // NaN when every replicate was discarded
  double c2_raw = 0.0;
  int n_used = 0;
  int n_discarded = 0;
  int n_refitted = 0;

  bool missing() const { return n_used == 0; }
};

// Monte Carlo inputs shared by every grid point.
struct CriterionSetup {
  GammaPrior prior;
  ModelParams truth;
  double p = 0.10;
  int replicates = 1000;  // B
  SamplerConfig sampler;  // sampler.seed is ignored; streams derive from seed
};

// Replicate b draws its dataset from seed.child({b, 0}) and its sampler
// from seed.child({b, 1}).
CriterionPoint criterion_at(const DesignSpec& design,
                            const CriterionSetup& setup, RngSeed seed,
                            Execution exec = {});

// Evaluates criterion_at on every design; design k uses seed.child({k}).
// Work items are (design, replicate) pairs so the whole grid shares one
// parallel loop.
std::vector<CriterionPoint> evaluate_grid(const std::vector<DesignSpec>& designs,
                                          const CriterionSetup& setup,
                                          RngSeed seed, Execution exec = {});

// Equally spaced points from lo to hi inclusive; the midpoint when m == 1.
std::vector<double> linspace(double lo, double hi, int m);

// Grid spacing (hi - lo) / (m - 1), or hi - lo when m == 1.
double grid_bandwidth(double lo, double hi, int m);

// Nadaraya-Watson with a Gaussian kernel; NaN values are skipped. Throws
// CriterionError if no value is usable.
double smooth_1d(const std::vector<double>& tau, const std::vector<double>& value,
                 double h, double query);

double smooth_2d(const std::vector<double>& x1, const std::vector<double>& tau,
                 const std::vector<double>& value, double h_x1, double h_tau,
                 double query_x1, double query_tau);

struct Optimum {
  double x1 = 0.0;
  double tau = 0.0;
  double value = 0.0;
};

struct FinePoint {
  double x1;
  double tau;
  double c1;
  double c2;
};

struct CriterionSurface {
  std::vector<CriterionPoint> grid;
  double h_tau = 0.0;
  double h_x1 = 0.0;        // 0 for one-variable searches
  std::vector<FinePoint> fine;
  std::array<Optimum, 2> optimum{};  // C1, C2
};

struct TauGrid {
  double lo = 0.05;
  double hi = 5.95;
  int m = 25;
};

inline constexpr int kFine1d = 500;
inline constexpr int kFineTau2d = 100;
inline constexpr int kFineX1_2d = 50;

// Smooths raw grid values and minimises on the fine grid. Grid points must
// all share the same x1. Ties go to the smaller tau.
CriterionSurface smooth_and_optimise_1d(std::vector<CriterionPoint> grid,
                                        double h_tau);

// Ties go to the smaller x1, then the smaller tau.
CriterionSurface smooth_and_optimise_2d(std::vector<CriterionPoint> grid,
                                        double h_x1, double h_tau);

CriterionSurface optimise_1d(const DesignSpec& base, const TauGrid& taus,
                             const CriterionSetup& setup, RngSeed seed,
                             Execution exec = {});

CriterionSurface optimise_2d(const DesignSpec& base,
                             const std::vector<double>& x1_grid,
                             const TauGrid& taus, const CriterionSetup& setup,
                             RngSeed seed, Execution exec = {});

}  // namespace ssalt
