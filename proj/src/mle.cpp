#include "ssalt/mle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "optimize.hpp"
#include "ssalt/likelihood.hpp"

namespace ssalt {

namespace {

// Unconstrained coordinates of one risk block: (a, log(-b), log beta).
std::array<double, 3> to_free(const RiskParams& r) {
  return {r.a, std::log(-r.b), std::log(r.beta)};
}

RiskParams from_free(const double* u) {
  return {u[0], -std::exp(u[1]), std::exp(u[2])};
}

// Negative log-likelihood of the listed risks over free coordinates.
opt::Objective block_objective(const Dataset& data,
                               std::vector<std::size_t> risks) {
  return [&data, risks](const std::vector<double>& u, std::vector<double>& g) {
    double value = 0.0;
    for (std::size_t k = 0; k < risks.size(); ++k) {
      const double* uk = u.data() + 3 * k;
      const RiskParams rp = from_free(uk);
      if (!std::isfinite(rp.b) || !std::isfinite(rp.beta) || rp.b == 0.0 ||
          rp.beta == 0.0) {
        return std::numeric_limits<double>::infinity();
      }
      std::array<double, 3> gn{};
      value -= risk_log_lik(rp, risks[k], data, &gn);
      // d/du = d/dnatural * dnatural/du with db/du = b, dbeta/du = beta.
      g[3 * k] = -gn[0];
      g[3 * k + 1] = -gn[1] * rp.b;
      g[3 * k + 2] = -gn[2] * rp.beta;
    }
    return std::isfinite(value) ? value
                                : std::numeric_limits<double>::infinity();
  };
}

opt::Result optimise(const opt::Objective& f, std::vector<double> x0,
                     int max_iterations) {
  opt::BfgsOptions bo;
  bo.max_iterations = max_iterations;
  auto res = opt::minimize_bfgs(f, x0, bo);
  if (res.converged) return res;
  // Line search stalled or ran out of iterations: restart from a simplex
  // polish, then let BFGS finish.
  auto nm = opt::minimize_simplex(f, res.stalled ? x0 : res.x);
  if (std::isfinite(res.value) && res.value < nm.value) nm.x = res.x;
  auto again = opt::minimize_bfgs(f, nm.x, bo);
  again.iterations += res.iterations + nm.iterations;
  if (!std::isfinite(again.value) ||
      (std::isfinite(res.value) && res.value < again.value)) {
    res.iterations = again.iterations;
    return res;
  }
  return again;
}

}  // namespace

void require_identifiable(const Dataset& data) {
  const auto counts = data.failure_counts();
  for (std::size_t j = 0; j < kNumRisks; ++j) {
    for (int l = 0; l < 2; ++l) {
      if (counts[j][static_cast<std::size_t>(l)] == 0) {
        throw NonIdentifiable(
            "fit_mle: no failures from cause " + std::to_string(j + 1) +
            " in phase " + std::to_string(l + 1) +
            "; the likelihood has no finite maximum");
      }
    }
  }
}

ModelParams default_mle_init(const Dataset& data) {
  const DesignSpec& d = data.design();
  double ttt1 = 0.0;
  double ttt2 = 0.0;
  for (const auto& o : data.observations()) {
    ttt1 += std::min(o.time, d.tau());
    ttt2 += std::max(0.0, o.time - d.tau());
  }
  const auto counts = data.failure_counts();
  ModelParams init;
  for (std::size_t j = 0; j < kNumRisks; ++j) {
    const double c1 = std::max(0.5, static_cast<double>(counts[j][0]));
    const double c2 = std::max(0.5, static_cast<double>(counts[j][1]));
    const double log_theta1 = std::log(std::max(ttt1, 1e-12) / c1);
    const double log_theta2 = std::log(std::max(ttt2, 1e-12) / c2);
    double b = (log_theta2 - log_theta1) / (1.0 - d.x1());
    if (!(b < -1e-3)) b = -0.1;
    init.risk[j] = {log_theta1 - b * d.x1(), b, 1.0};
  }
  return init;
}

MleFit fit_mle(const Dataset& data, std::optional<ModelParams> init,
               const MleOptions& options) {
  require_identifiable(data);
  ModelParams start = init ? *init : default_mle_init(data);
  if (!start.valid()) start = default_mle_init(data);

  MleFit fit;
  if (options.joint) {
    std::vector<double> x0;
    for (const auto& r : start.risk) {
      const auto u = to_free(r);
      x0.insert(x0.end(), u.begin(), u.end());
    }
    const auto res =
        optimise(block_objective(data, {0, 1}), x0, options.max_iterations);
    for (std::size_t j = 0; j < kNumRisks; ++j) {
      fit.params.risk[j] = from_free(res.x.data() + 3 * j);
    }
    fit.iterations = res.iterations;
  } else {
    for (std::size_t j = 0; j < kNumRisks; ++j) {
      const auto u = to_free(start.risk[j]);
      const auto res = optimise(block_objective(data, {j}),
                                {u.begin(), u.end()}, options.max_iterations);
      fit.params.risk[j] = from_free(res.x.data());
      fit.iterations += res.iterations;
    }
  }

  const auto ll = log_lik(fit.params, data, true);
  fit.loglik = ll.value;
  double gmax = 0.0;
  for (double g : *ll.gradient) gmax = std::max(gmax, std::abs(g));
  fit.converged = fit.params.valid() && std::isfinite(ll.value) && gmax < 1e-4;
  return fit;
}

EdfStatistics edf_statistics(const Dataset& data, const ModelParams& params) {
  const auto curve = edf_curve(data, params);
  EdfStatistics s;
  if (curve.empty()) return s;
  double prev = 0.0;  // F_n just before the current jump
  for (const auto& p : curve) {
    s.ks = std::max({s.ks, std::abs(p.empirical - p.fitted),
                     std::abs(prev - p.fitted)});
    s.cvm += (p.empirical - p.fitted) * (p.empirical - p.fitted);
    prev = p.empirical;
  }
  s.cvm /= static_cast<double>(curve.size());
  return s;
}

std::vector<EdfPoint> edf_curve(const Dataset& data,
                                const ModelParams& params) {
  const auto sorted = data.sorted();
  const double n = static_cast<double>(data.size());
  std::vector<EdfPoint> out;
  int failures = 0;
  for (const auto& o : sorted) {
    if (o.censored()) continue;
    ++failures;
    const double fn = failures / n;
    // Tied failure times collapse to one jump.
    if (!out.empty() && out.back().time == o.time) {
      out.back().empirical = fn;
      continue;
    }
    out.push_back({o.time, fn, overall_cdf(params, data.design(), o.time)});
  }
  return out;
}

double bootstrap_pvalue(double observed, const std::vector<double>& boot) {
  const auto exceed =
      std::count_if(boot.begin(), boot.end(),
                    [observed](double b) { return b >= observed; });
  return (1.0 + static_cast<double>(exceed)) /
         (static_cast<double>(boot.size()) + 1.0);
}

GofResult gof_bootstrap(const Dataset& data, const MleFit& fit, int n_boot,
                        RngSeed seed, Execution exec) {
  if (n_boot < 1) throw DomainError("gof_bootstrap: n_boot must be >= 1");
  if (!fit.converged) {
    throw SolverError("gof_bootstrap: fit has not converged");
  }
  const auto observed = edf_statistics(data, fit.params);

  GofResult out;
  out.ks_stat = observed.ks;
  out.cvm_stat = observed.cvm;
  out.n_boot = n_boot;
  const auto reps = bootstrap_replicates<EdfStatistics>(
      fit.params, data.design(), n_boot, seed, exec,
      [&fit](const Dataset& sample) {
        const auto refit = fit_mle(sample, fit.params);
        if (!refit.converged) {
          throw SolverError("gof_bootstrap: replicate fit did not converge");
        }
        return edf_statistics(sample, refit.params);
      },
      &out.n_regenerated);

  std::vector<double> ks, cvm;
  ks.reserve(reps.size());
  cvm.reserve(reps.size());
  for (const auto& r : reps) {
    ks.push_back(r.ks);
    cvm.push_back(r.cvm);
  }
  out.ks_pvalue = bootstrap_pvalue(observed.ks, ks);
  out.cvm_pvalue = bootstrap_pvalue(observed.cvm, cvm);
  return out;
}

}  // namespace ssalt
