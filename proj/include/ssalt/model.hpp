#pragma once

// Step-stress competing-risks lifetime model under cumulative exposure.
//
// Two independent Weibull risks; the Weibull scale of risk j at standardised
// stress x is theta_j(x) = exp(a_j + b_j x). Stress is raised from x1 to
// x2 = 1 at time tau and the test is censored at tc. Times are in units of
// hundred hours throughout.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

namespace ssalt {

inline constexpr std::size_t kNumRisks = 2;

// Stress values on the Arrhenius scale s = 1/T (inverse Kelvin).
class StressFrame {
 public:
  // Requires s0 >= s1 > s2 > 0. s1 == s0 is accepted: a first phase run at
  // use stress (x1 = 0) is a legitimate test plan.
  StressFrame(double s0, double s1, double s2);

  static StressFrame from_kelvin(double t0, double t1, double t2);

  double s0() const { return s0_; }
  double s1() const { return s1_; }
  double s2() const { return s2_; }

  // Standardised lower test stress (s1 - s0) / (s2 - s0).
  double x1() const;

  // Same s0 and s2, lower test stress moved to standardised level x1.
  StressFrame with_x1(double x1) const;

 private:
  double s0_;
  double s1_;
  double s2_;
};

// Affine map x = (s - s0) / (s2 - s0), so that s0 -> 0 and s2 -> 1.
double standardise_stress(double s, const StressFrame& frame);

class DesignSpec {
 public:
  DesignSpec(StressFrame frame, double tau, double tc, int n);

  const StressFrame& frame() const { return frame_; }
  double tau() const { return tau_; }
  double tc() const { return tc_; }
  int n() const { return n_; }

  double x1() const { return x1_; }
  // Standardised stress of phase l in {1, 2}.
  double x(int phase) const { return phase == 1 ? x1_ : 1.0; }
  // Phase in force at time t; t == tau belongs to phase 2.
  int phase_at(double t) const { return t < tau_ ? 1 : 2; }

  DesignSpec with_tau(double tau) const { return {frame_, tau, tc_, n_}; }
  DesignSpec with_n(int n) const { return {frame_, tau_, tc_, n}; }
  DesignSpec with_tc(double tc) const { return {frame_, tau_, tc, n_}; }
  DesignSpec with_x1(double x1) const {
    return {frame_.with_x1(x1), tau_, tc_, n_};
  }

 private:
  StressFrame frame_;
  double tau_;
  double tc_;
  int n_;
  double x1_;
};

struct RiskParams {
  double a = 0.0;     // log-scale intercept, log theta at use stress
  double b = -1.0;    // stress slope, negative
  double beta = 1.0;  // Weibull shape
};

struct ModelParams {
  std::array<RiskParams, kNumRisks> risk{};

  // b_j < 0, beta_j > 0 and everything finite.
  bool valid() const;
  // Throws DomainError naming the violated condition.
  void validate() const;

  // Flattened as (a1, b1, beta1, a2, b2, beta2).
  std::array<double, 6> to_array() const;
  static ModelParams from_array(std::span<const double, 6> v);
};

struct Observation {
  double time = 0.0;
  int cause = 0;  // 0 = censored at tc, 1 or 2 = failed from that risk

  bool censored() const { return cause == 0; }
};

// A complete SSALT sample: n units, failures with their cause, survivors
// censored at tc.
class Dataset {
 public:
  // Throws DataError if an observation is inconsistent with the design or
  // the observation count differs from design.n().
  Dataset(DesignSpec design, std::vector<Observation> observations);

  const DesignSpec& design() const { return design_; }
  std::span<const Observation> observations() const { return obs_; }
  std::size_t size() const { return obs_.size(); }
  int n_failures() const { return n_failures_; }

  // failures[risk][phase-1]
  std::array<std::array<int, 2>, kNumRisks> failure_counts() const;

  // Observations sorted by time (failures first on ties with censoring).
  std::vector<Observation> sorted() const;

 private:
  DesignSpec design_;
  std::vector<Observation> obs_;
  int n_failures_ = 0;
};

double theta(const ModelParams& params, std::size_t risk, double x);

// Time on the phase-l clock that produces the same exposure as t under the
// step profile: t before tau, t - tau + tau * theta(x2) / theta(x1) after.
double cem_transformed_time(const ModelParams& params, std::size_t risk,
                            const DesignSpec& design, double t);

// Cumulative exposure psi_{l,j}(t) = transformed time / theta_j(x_l).
double cumulative_exposure(const ModelParams& params, std::size_t risk,
                           const DesignSpec& design, double t);

// Cause-specific CDF G_{l,j}(t) and density g_{l,j}(t).
double sub_cdf(const ModelParams& params, std::size_t risk,
               const DesignSpec& design, double t);
double sub_density(const ModelParams& params, std::size_t risk,
                   const DesignSpec& design, double t);

// Distribution of the first failure from either risk.
double overall_cdf(const ModelParams& params, const DesignSpec& design,
                   double t);

// p-th quantile of the lifetime at use stress x0 = 0: the root of
// sum_j (t e^{-a_j})^{beta_j} = -log(1 - p).
double use_quantile(const ModelParams& params, double p);

namespace detail {

// log psi for a phase-2 time, computed without forming theta explicitly.
// eta1, eta2 are log theta at x1 and x2. Also returns the share of the
// exposure accumulated during phase 1 (needed by gradients).
struct LogExposure {
  double log_psi;
  double phase1_share;
};

inline LogExposure log_exposure(double eta1, double eta2, double tau,
                                double t) {
  if (t < tau) return {std::log(t) - eta1, 1.0};
  const double l1 = std::log(tau) - eta1;
  if (t == tau) return {l1, 1.0};
  const double l2 = std::log(t - tau) - eta2;
  const double hi = std::max(l1, l2);
  const double e1 = std::exp(l1 - hi);
  const double e2 = std::exp(l2 - hi);
  return {hi + std::log(e1 + e2), e1 / (e1 + e2)};
}

}  // namespace detail

}  // namespace ssalt
