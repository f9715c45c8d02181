#include "ssalt/design.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ssalt/errors.hpp"
#include "ssalt/simulate.hpp"

namespace ssalt {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct ReplicateOutcome {
  double var_tp = kNaN;
  double var_log_tp = kNaN;
  FitStatus status = FitStatus::Discarded;
};

double column_variance(const Eigen::MatrixXd& m, int column) {
  const auto c = m.col(column);
  const double mean = c.mean();
  return (c.array() - mean).square().sum() /
         (static_cast<double>(c.size()) - 1.0);
}

ReplicateOutcome run_replicate(const DesignSpec& design,
                               const CriterionSetup& setup, RngSeed point_seed,
                               std::size_t b) {
  const auto rb = static_cast<std::uint64_t>(b);
  const Dataset data =
      simulate_dataset(setup.truth, design, point_seed.child({rb, 0}));
  SamplerConfig cfg = setup.sampler;
  cfg.seed = point_seed.child({rb, 1});
  ReplicateOutcome out;
  try {
    const auto fit = sample_with_refit(&data, design, setup.prior, setup.p, cfg,
                                       Execution{1});
    out.status = fit.status;
    if (fit.status != FitStatus::Discarded) {
      out.var_tp = column_variance(fit.run.draws.values, col::kTp);
      out.var_log_tp = column_variance(fit.run.draws.values, col::kLogTp);
    }
  } catch (const InitialisationError&) {
    out.status = FitStatus::Discarded;
  } catch (const SolverError&) {
    out.status = FitStatus::Discarded;
  }
  return out;
}

CriterionPoint aggregate(const DesignSpec& design,
                         const std::vector<ReplicateOutcome>& reps) {
  CriterionPoint pt;
  pt.x1 = design.x1();
  pt.tau = design.tau();
  std::vector<double> v1, v2;
  for (const auto& r : reps) {
    if (r.status == FitStatus::Discarded) {
      ++pt.n_discarded;
      continue;
    }
    if (r.status == FitStatus::Refitted) ++pt.n_refitted;
    v1.push_back(r.var_tp);
    v2.push_back(r.var_log_tp);
  }
  pt.n_used = static_cast<int>(v1.size());
  if (pt.n_used == 0) {
    pt.c1_raw = pt.c2_raw = kNaN;
  } else {
    pt.c1_raw = pairwise_sum(v1) / pt.n_used;
    pt.c2_raw = pairwise_sum(v2) / pt.n_used;
  }
  return pt;
}

void check_setup(const CriterionSetup& setup) {
  if (setup.replicates < 1) {
    throw ConfigError("design-criteria", "replicates (B) must be >= 1");
  }
  if (!(setup.p > 0.0 && setup.p < 1.0)) {
    throw ConfigError("design-criteria", "p must lie in (0, 1)");
  }
  setup.prior.validate();
  setup.sampler.validate();
  setup.truth.validate();
}

// Index of the minimum; strict comparison keeps the first (smallest
// coordinate) on ties.
std::size_t argmin(const std::vector<double>& v) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (v[i] < v[best]) best = i;
  }
  return best;
}

void split_values(const std::vector<CriterionPoint>& grid,
                  std::vector<double>& x1, std::vector<double>& tau,
                  std::vector<double>& c1, std::vector<double>& c2) {
  for (const auto& g : grid) {
    x1.push_back(g.x1);
    tau.push_back(g.tau);
    c1.push_back(g.missing() ? kNaN : g.c1_raw);
    c2.push_back(g.missing() ? kNaN : g.c2_raw);
  }
}

}  // namespace

CriterionPoint criterion_at(const DesignSpec& design,
                            const CriterionSetup& setup, RngSeed seed,
                            Execution exec) {
  check_setup(setup);
  std::vector<ReplicateOutcome> reps(static_cast<std::size_t>(setup.replicates));
  for_each_index(reps.size(), exec, [&](std::size_t b) {
    reps[b] = run_replicate(design, setup, seed, b);
  });
  return aggregate(design, reps);
}

std::vector<CriterionPoint> evaluate_grid(const std::vector<DesignSpec>& designs,
                                          const CriterionSetup& setup,
                                          RngSeed seed, Execution exec) {
  check_setup(setup);
  const auto b_count = static_cast<std::size_t>(setup.replicates);
  std::vector<ReplicateOutcome> reps(designs.size() * b_count);
  for_each_index(reps.size(), exec, [&](std::size_t i) {
    const std::size_t k = i / b_count;
    const std::size_t b = i % b_count;
    reps[i] = run_replicate(designs[k], setup,
                            seed.child({static_cast<std::uint64_t>(k)}), b);
  });
  std::vector<CriterionPoint> out;
  out.reserve(designs.size());
  for (std::size_t k = 0; k < designs.size(); ++k) {
    const auto first = reps.begin() + static_cast<std::ptrdiff_t>(k * b_count);
    out.push_back(aggregate(
        designs[k],
        std::vector<ReplicateOutcome>(first, first + static_cast<std::ptrdiff_t>(b_count))));
  }
  return out;
}

std::vector<double> linspace(double lo, double hi, int m) {
  if (m < 1) throw ConfigError("design-criteria", "grid size must be >= 1");
  if (m == 1) return {0.5 * (lo + hi)};
  std::vector<double> v(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) {
    v[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / (m - 1.0);
  }
  v.back() = hi;
  return v;
}

double grid_bandwidth(double lo, double hi, int m) {
  return m > 1 ? (hi - lo) / (m - 1.0) : hi - lo;
}

double smooth_1d(const std::vector<double>& tau, const std::vector<double>& value,
                 double h, double query) {
  double num = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i < tau.size(); ++i) {
    if (std::isnan(value[i])) continue;
    const double u = (query - tau[i]) / h;
    const double w = std::exp(-0.5 * u * u);
    num += w * value[i];
    den += w;
  }
  if (!(den > 0.0)) {
    throw CriterionError("smooth_1d: no usable grid values near the query");
  }
  return num / den;
}

double smooth_2d(const std::vector<double>& x1, const std::vector<double>& tau,
                 const std::vector<double>& value, double h_x1, double h_tau,
                 double query_x1, double query_tau) {
  double num = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i < tau.size(); ++i) {
    if (std::isnan(value[i])) continue;
    const double ux = (query_x1 - x1[i]) / h_x1;
    const double ut = (query_tau - tau[i]) / h_tau;
    const double w = std::exp(-0.5 * ux * ux) * std::exp(-0.5 * ut * ut);
    num += w * value[i];
    den += w;
  }
  if (!(den > 0.0)) {
    throw CriterionError("smooth_2d: no usable grid values near the query");
  }
  return num / den;
}

CriterionSurface smooth_and_optimise_1d(std::vector<CriterionPoint> grid,
                                        double h_tau) {
  if (grid.empty()) throw CriterionError("optimise_1d: empty grid");
  CriterionSurface s;
  s.grid = std::move(grid);
  s.h_tau = h_tau;
  std::vector<double> x1, tau, c1, c2;
  split_values(s.grid, x1, tau, c1, c2);
  const auto [lo, hi] = std::minmax_element(tau.begin(), tau.end());
  const std::vector<double> fine =
      s.grid.size() == 1 ? std::vector<double>{*lo} : linspace(*lo, *hi, kFine1d);
  std::vector<double> f1, f2;
  for (double t : fine) {
    f1.push_back(smooth_1d(tau, c1, h_tau, t));
    f2.push_back(smooth_1d(tau, c2, h_tau, t));
    s.fine.push_back({x1.front(), t, f1.back(), f2.back()});
  }
  const auto i1 = argmin(f1);
  const auto i2 = argmin(f2);
  s.optimum[0] = {x1.front(), fine[i1], f1[i1]};
  s.optimum[1] = {x1.front(), fine[i2], f2[i2]};
  return s;
}

CriterionSurface smooth_and_optimise_2d(std::vector<CriterionPoint> grid,
                                        double h_x1, double h_tau) {
  if (grid.empty()) throw CriterionError("optimise_2d: empty grid");
  CriterionSurface s;
  s.grid = std::move(grid);
  s.h_tau = h_tau;
  s.h_x1 = h_x1;
  std::vector<double> x1, tau, c1, c2;
  split_values(s.grid, x1, tau, c1, c2);
  const auto [tlo, thi] = std::minmax_element(tau.begin(), tau.end());
  const auto [xlo, xhi] = std::minmax_element(x1.begin(), x1.end());
  const auto fine_tau = *tlo == *thi ? std::vector<double>{*tlo}
                                     : linspace(*tlo, *thi, kFineTau2d);
  const auto fine_x1 = *xlo == *xhi ? std::vector<double>{*xlo}
                                    : linspace(*xlo, *xhi, kFineX1_2d);
  // x1-major so the first minimum found has the smallest x1, then tau.
  std::vector<double> f1, f2;
  for (double x : fine_x1) {
    for (double t : fine_tau) {
      f1.push_back(smooth_2d(x1, tau, c1, h_x1, h_tau, x, t));
      f2.push_back(smooth_2d(x1, tau, c2, h_x1, h_tau, x, t));
      s.fine.push_back({x, t, f1.back(), f2.back()});
    }
  }
  const auto i1 = argmin(f1);
  const auto i2 = argmin(f2);
  s.optimum[0] = {s.fine[i1].x1, s.fine[i1].tau, f1[i1]};
  s.optimum[1] = {s.fine[i2].x1, s.fine[i2].tau, f2[i2]};
  return s;
}

CriterionSurface optimise_1d(const DesignSpec& base, const TauGrid& taus,
                             const CriterionSetup& setup, RngSeed seed,
                             Execution exec) {
  std::vector<DesignSpec> designs;
  for (double t : linspace(taus.lo, taus.hi, taus.m)) {
    designs.push_back(base.with_tau(t));
  }
  return smooth_and_optimise_1d(evaluate_grid(designs, setup, seed, exec),
                                grid_bandwidth(taus.lo, taus.hi, taus.m));
}

CriterionSurface optimise_2d(const DesignSpec& base,
                             const std::vector<double>& x1_grid,
                             const TauGrid& taus, const CriterionSetup& setup,
                             RngSeed seed, Execution exec) {
  if (x1_grid.empty()) throw ConfigError("design-criteria", "x1 grid is empty");
  std::vector<DesignSpec> designs;
  const auto tau_values = linspace(taus.lo, taus.hi, taus.m);
  for (double x : x1_grid) {
    for (double t : tau_values) designs.push_back(base.with_x1(x).with_tau(t));
  }
  const auto [xlo, xhi] = std::minmax_element(x1_grid.begin(), x1_grid.end());
  const int m2 = static_cast<int>(x1_grid.size());
  const double h_x1 = m2 > 1 ? (*xhi - *xlo) / (m2 - 1.0) : 1.0;
  return smooth_and_optimise_2d(evaluate_grid(designs, setup, seed, exec), h_x1,
                                grid_bandwidth(taus.lo, taus.hi, taus.m));
}

}  // namespace ssalt
