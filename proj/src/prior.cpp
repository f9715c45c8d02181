#include "ssalt/prior.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <vector>

namespace ssalt {

std::string_view flavour_name(PriorFlavour f) {
  switch (f) {
    case PriorFlavour::I:
      return "I";
    case PriorFlavour::II:
      return "II";
    case PriorFlavour::III:
      return "III";
    case PriorFlavour::Custom:
      break;
  }
  return "custom";
}

PriorFlavour parse_flavour(std::string_view s) {
  if (s == "I") return PriorFlavour::I;
  if (s == "II") return PriorFlavour::II;
  if (s == "III") return PriorFlavour::III;
  std::string lower(s);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  if (lower == "custom") return PriorFlavour::Custom;
  throw ConfigError("prior", "unknown flavour '" + std::string(s) +
                                 "' (expected I, II, III or custom)");
}

void GammaPrior::validate() const {
  if (!(q > 0.0 && q < 1.0)) {
    throw ConfigError("prior", "q must lie in (0, 1)");
  }
  for (std::size_t k = 0; k < component.size(); ++k) {
    const auto& c = component[k];
    if (!(c.alpha > 0.0 && std::isfinite(c.alpha) && c.lambda > 0.0 &&
          std::isfinite(c.lambda))) {
      throw ConfigError("prior", "component " + std::to_string(k) +
                                     " needs alpha > 0 and lambda > 0");
    }
  }
}

GammaComponent mom_gamma(double mean, double se) {
  if (!(mean > 0.0 && se > 0.0) || !std::isfinite(mean) ||
      !std::isfinite(se)) {
    throw DomainError("mom_gamma: mean and se must be positive and finite");
  }
  return {mean * mean / (se * se), mean / (se * se)};
}

namespace {

struct Replicate {
  std::array<double, 6> phi{};
  std::array<double, 3> quantile{};
};

void mean_sd(const std::vector<double>& v, double& mean, double& sd) {
  mean = pairwise_sum(v) / static_cast<double>(v.size());
  std::vector<double> sq(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    sq[i] = (v[i] - mean) * (v[i] - mean);
  }
  sd = v.size() > 1 ? std::sqrt(pairwise_sum(sq) / (v.size() - 1.0)) : 0.0;
}

}  // namespace

BootstrapSummary elicit_bootstrap(const Dataset& data, const MleFit& fit,
                                  int n_reps, double q, RngSeed seed,
                                  Execution exec) {
  if (n_reps < 1) throw DomainError("elicit_bootstrap: n_reps must be >= 1");
  if (!fit.converged) {
    throw SolverError("elicit_bootstrap: fit has not converged");
  }
  log_neg_log1m(q);  // validates q

  BootstrapSummary out;
  out.q = q;
  const auto reps = bootstrap_replicates<Replicate>(
      fit.params, data.design(), n_reps, seed, exec,
      [&](const Dataset& sample) {
        const auto refit = fit_mle(sample, fit.params);
        if (!refit.converged) {
          throw SolverError("elicit_bootstrap: replicate fit did not converge");
        }
        Replicate r;
        r.phi = to_phi(refit.params, q).to_array();
        for (std::size_t k = 0; k < 3; ++k) {
          r.quantile[k] = use_quantile(refit.params, out.quantile_p[k]);
        }
        return r;
      },
      &out.n_regenerated);
  out.n_valid = static_cast<int>(reps.size());

  std::vector<double> col(reps.size());
  for (std::size_t c = 0; c < 6; ++c) {
    for (std::size_t r = 0; r < reps.size(); ++r) col[r] = reps[r].phi[c];
    mean_sd(col, out.mean[c], out.se[c]);
  }
  for (std::size_t c = 0; c < 3; ++c) {
    for (std::size_t r = 0; r < reps.size(); ++r) col[r] = reps[r].quantile[c];
    mean_sd(col, out.quantile_mean[c], out.quantile_se[c]);
  }
  return out;
}

GammaPrior build_prior(const BootstrapSummary& summary, PriorFlavour flavour) {
  GammaPrior prior;
  prior.q = summary.q;
  prior.flavour = flavour;
  const double inflate = flavour == PriorFlavour::I ? 1.0 : 1.5;
  for (std::size_t k = 0; k < 6; ++k) {
    double mean = summary.mean[k];
    const bool slope = k % 3 == 1;
    if (flavour == PriorFlavour::III && slope) mean += 1.5 * summary.se[k];
    prior.component[k] = mom_gamma(mean, inflate * summary.se[k]);
  }
  return prior;
}

double log_gamma_density(double x, const GammaComponent& g) {
  if (!(x > 0.0) || !std::isfinite(x)) {
    return -std::numeric_limits<double>::infinity();
  }
  return g.alpha * std::log(g.lambda) - std::lgamma(g.alpha) +
         (g.alpha - 1.0) * std::log(x) - g.lambda * x;
}

double log_prior_phi(const PhiParams& phi, const GammaPrior& prior) {
  const auto v = phi.to_array();
  double s = 0.0;
  for (std::size_t k = 0; k < 6; ++k) {
    s += log_gamma_density(v[k], prior.component[k]);
  }
  return s;
}

double log_prior_natural(const ModelParams& params, const GammaPrior& prior) {
  for (const auto& r : params.risk) {
    if (!(r.b < 0.0) || !(r.beta > 0.0)) {
      return -std::numeric_limits<double>::infinity();
    }
  }
  const double c = log_neg_log1m(prior.q);
  double log_jac = 0.0;
  for (const auto& r : params.risk) log_jac += r.a + c / r.beta;
  return log_prior_phi(to_phi(params, prior.q), prior) + log_jac;
}

PhiParams sample_prior(const GammaPrior& prior, CounterRng& rng) {
  std::array<double, 6> v{};
  for (std::size_t k = 0; k < 6; ++k) {
    const auto& g = prior.component[k];
    v[k] = rng.gamma(g.alpha) / g.lambda;
  }
  return PhiParams::from_array(v, prior.q);
}

}  // namespace ssalt
