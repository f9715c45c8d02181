#include "ssalt/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "ssalt/errors.hpp"

namespace ssalt {

namespace {

bool finite(double v) { return std::isfinite(v); }

}  // namespace

StressFrame::StressFrame(double s0, double s1, double s2)
    : s0_(s0), s1_(s1), s2_(s2) {
  if (!finite(s0) || !finite(s1) || !finite(s2)) {
    throw DomainError("StressFrame: stresses must be finite");
  }
  if (!(s2 > 0.0 && s1 > s2 && s0 >= s1)) {
    throw DomainError(
        "StressFrame: require s0 >= s1 > s2 > 0 (use temperature <= lower "
        "test temperature < higher test temperature)");
  }
}

StressFrame StressFrame::from_kelvin(double t0, double t1, double t2) {
  if (!(t0 > 0.0 && t1 > 0.0 && t2 > 0.0)) {
    throw DomainError("StressFrame: temperatures must be positive Kelvin");
  }
  return {1.0 / t0, 1.0 / t1, 1.0 / t2};
}

double StressFrame::x1() const { return standardise_stress(s1_, *this); }

StressFrame StressFrame::with_x1(double x1) const {
  if (!(x1 >= 0.0 && x1 < 1.0)) {
    throw DomainError("StressFrame::with_x1: x1 must lie in [0, 1)");
  }
  return {s0_, s0_ + x1 * (s2_ - s0_), s2_};
}

double standardise_stress(double s, const StressFrame& frame) {
  if (!finite(s)) throw DomainError("standardise_stress: non-finite stress");
  return (s - frame.s0()) / (frame.s2() - frame.s0());
}

DesignSpec::DesignSpec(StressFrame frame, double tau, double tc, int n)
    : frame_(frame), tau_(tau), tc_(tc), n_(n), x1_(frame.x1()) {
  if (!(finite(tau) && finite(tc) && tau > 0.0 && tau < tc)) {
    throw DomainError("DesignSpec: require 0 < tau < tc");
  }
  if (n < 1) throw DomainError("DesignSpec: require n >= 1");
}

bool ModelParams::valid() const {
  return std::all_of(risk.begin(), risk.end(), [](const RiskParams& r) {
    return finite(r.a) && finite(r.b) && finite(r.beta) && r.b < 0.0 &&
           r.beta > 0.0;
  });
}

void ModelParams::validate() const {
  for (std::size_t j = 0; j < kNumRisks; ++j) {
    const auto& r = risk[j];
    const std::string tag = "ModelParams risk " + std::to_string(j + 1);
    if (!finite(r.a) || !finite(r.b) || !finite(r.beta)) {
      throw DomainError(tag + ": non-finite parameter");
    }
    if (!(r.b < 0.0)) throw DomainError(tag + ": slope b must be negative");
    if (!(r.beta > 0.0)) throw DomainError(tag + ": shape must be positive");
  }
}

std::array<double, 6> ModelParams::to_array() const {
  return {risk[0].a, risk[0].b, risk[0].beta,
          risk[1].a, risk[1].b, risk[1].beta};
}

ModelParams ModelParams::from_array(std::span<const double, 6> v) {
  ModelParams p;
  p.risk[0] = {v[0], v[1], v[2]};
  p.risk[1] = {v[3], v[4], v[5]};
  return p;
}

Dataset::Dataset(DesignSpec design, std::vector<Observation> observations)
    : design_(design), obs_(std::move(observations)) {
  if (static_cast<int>(obs_.size()) != design_.n()) {
    throw DataError("Dataset: " + std::to_string(obs_.size()) +
                    " observations but design n = " +
                    std::to_string(design_.n()));
  }
  const double tc = design_.tc();
  for (std::size_t i = 0; i < obs_.size(); ++i) {
    const auto& o = obs_[i];
    const std::string where = "Dataset: observation " + std::to_string(i + 1);
    if (o.cause < 0 || o.cause > 2) {
      throw DataError(where + ": cause must be 0, 1 or 2");
    }
    if (!finite(o.time)) throw DataError(where + ": non-finite time");
    if (o.cause == 0) {
      if (std::abs(o.time - tc) > 1e-9 * std::max(1.0, tc)) {
        throw DataError(where + ": censored time must equal tc");
      }
    } else {
      if (!(o.time > 0.0 && o.time <= tc)) {
        throw DataError(where + ": failure time must lie in (0, tc]");
      }
      ++n_failures_;
    }
  }
}

std::array<std::array<int, 2>, kNumRisks> Dataset::failure_counts() const {
  std::array<std::array<int, 2>, kNumRisks> counts{};
  for (const auto& o : obs_) {
    if (o.censored()) continue;
    ++counts[o.cause - 1][design_.phase_at(o.time) - 1];
  }
  return counts;
}

std::vector<Observation> Dataset::sorted() const {
  std::vector<Observation> out(obs_.begin(), obs_.end());
  std::stable_sort(out.begin(), out.end(),
                   [](const Observation& l, const Observation& r) {
                     if (l.time != r.time) return l.time < r.time;
                     return (l.cause != 0) && (r.cause == 0);
                   });
  return out;
}

double theta(const ModelParams& params, std::size_t risk, double x) {
  const auto& r = params.risk[risk];
  return std::exp(r.a + r.b * x);
}

double cem_transformed_time(const ModelParams& params, std::size_t risk,
                            const DesignSpec& design, double t) {
  if (!(t >= 0.0)) throw DomainError("cem_transformed_time: negative time");
  const double tau = design.tau();
  if (t < tau) return t;
  // theta(x2) / theta(x1) = exp(b (x2 - x1))
  const double ratio =
      std::exp(params.risk[risk].b * (1.0 - design.x1()));
  return t - tau + ratio * tau;
}

double cumulative_exposure(const ModelParams& params, std::size_t risk,
                           const DesignSpec& design, double t) {
  const double tt = cem_transformed_time(params, risk, design, t);
  return tt / theta(params, risk, design.x(design.phase_at(t)));
}

double sub_cdf(const ModelParams& params, std::size_t risk,
               const DesignSpec& design, double t) {
  if (!(t >= 0.0)) throw DomainError("sub_cdf: negative time");
  if (t == 0.0) return 0.0;
  const double psi = cumulative_exposure(params, risk, design, t);
  return -std::expm1(-std::pow(psi, params.risk[risk].beta));
}

double sub_density(const ModelParams& params, std::size_t risk,
                   const DesignSpec& design, double t) {
  if (!(t >= 0.0)) throw DomainError("sub_density: negative time");
  if (t == 0.0) return 0.0;
  const double beta = params.risk[risk].beta;
  const double th = theta(params, risk, design.x(design.phase_at(t)));
  const double psi = cumulative_exposure(params, risk, design, t);
  return beta / th * std::pow(psi, beta - 1.0) *
         std::exp(-std::pow(psi, beta));
}

double overall_cdf(const ModelParams& params, const DesignSpec& design,
                   double t) {
  if (!(t >= 0.0)) throw DomainError("overall_cdf: negative time");
  if (t == 0.0) return 0.0;
  double hazard = 0.0;
  for (std::size_t j = 0; j < kNumRisks; ++j) {
    hazard += std::pow(cumulative_exposure(params, j, design, t),
                       params.risk[j].beta);
  }
  return -std::expm1(-hazard);
}

namespace {

// LHS of the quantile equation and its t-derivative.
struct QuantileResidual {
  double lhs;
  double slope;
};

QuantileResidual quantile_lhs(const ModelParams& params, double t) {
  double lhs = 0.0;
  double slope = 0.0;
  const double lt = std::log(t);
  for (const auto& r : params.risk) {
    const double term = std::exp(r.beta * (lt - r.a));
    lhs += term;
    slope += r.beta * term / t;
  }
  return {lhs, slope};
}

double bisect_quantile(const ModelParams& params, double target) {
  double lo = 1e-12;
  while (quantile_lhs(params, lo).lhs > target) {
    lo *= 0.5;
    if (lo < std::numeric_limits<double>::min()) {
      throw SolverError("use_quantile: cannot bracket root from below");
    }
  }
  double hi = std::max(1.0, 2.0 * lo);
  while (quantile_lhs(params, hi).lhs < target) {
    hi *= 2.0;
    if (!std::isfinite(hi)) {
      throw SolverError("use_quantile: cannot bracket root from above");
    }
  }
  // Geometric bisection keeps relative precision across many decades.
  for (int it = 0; it < 400 && hi > lo * (1.0 + 4e-16); ++it) {
    const double mid = std::sqrt(lo) * std::sqrt(hi);
    if (mid <= lo || mid >= hi) break;
    if (quantile_lhs(params, mid).lhs < target) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace

double use_quantile(const ModelParams& params, double p) {
  if (!(p > 0.0 && p < 1.0)) {
    throw DomainError("use_quantile: p must lie in (0, 1)");
  }
  const double target = -std::log1p(-p);
  double a_min = params.risk[0].a;
  double beta_max = params.risk[0].beta;
  for (const auto& r : params.risk) {
    a_min = std::min(a_min, r.a);
    beta_max = std::max(beta_max, r.beta);
  }
  double t = std::exp(a_min) * std::pow(target, 1.0 / beta_max);
  if (!(t > 0.0) || !std::isfinite(t)) return bisect_quantile(params, target);

  double best_residual = std::numeric_limits<double>::infinity();
  int stalled = 0;
  for (int it = 0; it < 100; ++it) {
    const auto [lhs, slope] = quantile_lhs(params, t);
    const double residual = lhs - target;
    if (std::abs(residual) <= 4.0 * std::numeric_limits<double>::epsilon() *
                                  target) {
      return t;
    }
    if (std::abs(residual) < best_residual) {
      best_residual = std::abs(residual);
      stalled = 0;
    } else if (++stalled >= 5) {
      break;
    }
    const double step = residual / slope;
    const double next = t - step;
    if (!(next > 0.0) || !std::isfinite(next)) break;
    if (std::abs(step) <= 1e-15 * t) return next;
    t = next;
  }
  return bisect_quantile(params, target);
}

}  // namespace ssalt
