#include "ssalt/posterior.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ssalt/errors.hpp"
#include "ssalt/likelihood.hpp"
#include "ssalt/nuts.hpp"

namespace ssalt {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr int kInitAttempts = 100;

double quantile_sorted(const std::vector<double>& v, double p) {
  const double h = (static_cast<double>(v.size()) - 1.0) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (h - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

void fill_row(Eigen::MatrixXd& m, Eigen::Index row, const PhiParams& phi,
              const DesignSpec& design, double p) {
  const auto pa = phi.to_array();
  const ModelParams nat = from_phi(phi);
  const auto na = nat.to_array();
  for (int k = 0; k < 6; ++k) {
    m(row, col::kPhi + k) = pa[static_cast<std::size_t>(k)];
    m(row, col::kNatural + k) = na[static_cast<std::size_t>(k)];
  }
  for (std::size_t j = 0; j < kNumRisks; ++j) {
    const auto& r = nat.risk[j];
    const double lt1 = r.a + r.b * design.x1();
    const double lt2 = r.a + r.b;
    const auto base = static_cast<Eigen::Index>(2 * j);
    m(row, col::kLogTheta + base) = lt1;
    m(row, col::kLogTheta + base + 1) = lt2;
    m(row, col::kTheta + base) = std::exp(lt1);
    m(row, col::kTheta + base + 1) = std::exp(lt2);
  }
  const double tp = use_quantile(nat, p);
  m(row, col::kTp) = tp;
  m(row, col::kLogTp) = std::log(tp);
}

}  // namespace

SamplerConfig SamplerConfig::escalated() const {
  SamplerConfig c = *this;
  c.iter_warmup = 2000;
  c.iter_sampling = 2000;
  c.target_accept = 0.99;
  c.max_depth = 15;
  return c;
}

void SamplerConfig::validate() const {
  if (n_chains < 1) throw ConfigError("mcmc", "n_chains must be >= 1");
  if (iter_warmup < 0) throw ConfigError("mcmc", "iter_warmup must be >= 0");
  if (iter_sampling < 4) {
    throw ConfigError("mcmc", "iter_sampling must be >= 4");
  }
  if (!(target_accept > 0.0 && target_accept < 1.0)) {
    throw ConfigError("mcmc", "target_accept must lie in (0, 1)");
  }
  if (max_depth < 1) throw ConfigError("mcmc", "max_depth must be >= 1");
}

const std::array<std::string, col::kCount>& quantity_names() {
  static const std::array<std::string, col::kCount> names = {
      "phi11",         "phi21",         "phi31",         "phi12",
      "phi22",         "phi32",         "a1",            "b1",
      "beta1",         "a2",            "b2",            "beta2",
      "log_theta1_x1", "log_theta1_x2", "log_theta2_x1", "log_theta2_x2",
      "theta1_x1",     "theta1_x2",     "theta2_x1",     "theta2_x2",
      "t_p",           "log_t_p"};
  return names;
}

ChainMatrix PosteriorDraws::by_chain(int column) const {
  ChainMatrix m(iter_sampling, n_chains);
  for (int c = 0; c < n_chains; ++c) {
    m.col(c) = values.col(column).segment(
        static_cast<Eigen::Index>(c) * iter_sampling, iter_sampling);
  }
  return m;
}

double Diagnostics::max_rhat() const {
  double m = 0.0;
  for (const auto& q : quantity) {
    if (std::isnan(q.rhat)) return kNaN;
    m = std::max(m, q.rhat);
  }
  return m;
}

double Diagnostics::min_ess() const {
  double m = std::numeric_limits<double>::infinity();
  for (const auto& q : quantity) {
    if (std::isnan(q.ess_bulk) || std::isnan(q.ess_tail)) return kNaN;
    m = std::min({m, q.ess_bulk, q.ess_tail});
  }
  return m;
}

Diagnostics diagnose(const PosteriorDraws& draws) {
  Diagnostics d;
  for (int k = 0; k < col::kCount; ++k) {
    d.quantity[static_cast<std::size_t>(k)] = diagnose_quantity(draws.by_chain(k));
  }
  if (!draws.lp.empty()) {
    ChainMatrix lp(draws.iter_sampling, draws.n_chains);
    for (int c = 0; c < draws.n_chains; ++c) {
      for (int i = 0; i < draws.iter_sampling; ++i) {
        lp(i, c) = draws.lp[static_cast<std::size_t>(c * draws.iter_sampling + i)];
      }
    }
    d.lp = diagnose_quantity(lp);
  }
  return d;
}

double log_target_unconstrained(const Eigen::VectorXd& u, const Dataset* data,
                                const GammaPrior& prior,
                                Eigen::VectorXd* grad) {
  std::array<double, 6> v{};
  for (int k = 0; k < 6; ++k) {
    v[static_cast<std::size_t>(k)] = std::exp(u[k]);
    if (!(v[static_cast<std::size_t>(k)] > 0.0) ||
        !std::isfinite(v[static_cast<std::size_t>(k)])) {
      return -std::numeric_limits<double>::infinity();
    }
  }
  const PhiParams phi = PhiParams::from_array(v, prior.q);
  double lp = 0.0;
  for (int k = 0; k < 6; ++k) {
    const auto& g = prior.component[static_cast<std::size_t>(k)];
    // gamma log density of phi plus log|d phi / d u| = u
    lp += g.alpha * std::log(g.lambda) - std::lgamma(g.alpha) + g.alpha * u[k] -
          g.lambda * v[static_cast<std::size_t>(k)];
    if (grad) (*grad)[k] = g.alpha - g.lambda * v[static_cast<std::size_t>(k)];
  }
  if (data) {
    const ModelParams nat = from_phi(phi);
    const auto ll = log_lik(nat, *data, grad != nullptr);
    lp += ll.value;
    if (grad) {
      const auto gphi = natural_to_phi_gradient(*ll.gradient, phi);
      for (int k = 0; k < 6; ++k) {
        (*grad)[k] += gphi[static_cast<std::size_t>(k)] * v[static_cast<std::size_t>(k)];
      }
    }
  }
  return lp;
}

PosteriorRun sample_posterior(const Dataset* data, const DesignSpec& design,
                              const GammaPrior& prior, double p,
                              const SamplerConfig& config, Execution exec) {
  config.validate();
  prior.validate();
  if (!(p > 0.0 && p < 1.0)) throw DomainError("sample_posterior: p in (0,1)");

  const LogDensity target = [data, &prior](const Eigen::VectorXd& u,
                                           Eigen::VectorXd& g) {
    return log_target_unconstrained(u, data, prior, &g);
  };
  NutsSettings settings;
  settings.iter_warmup = config.iter_warmup;
  settings.iter_sampling = config.iter_sampling;
  settings.target_accept = config.target_accept;
  settings.max_depth = config.max_depth;
  settings.adapt_metric = config.adapt_metric;

  const auto n_chains = static_cast<std::size_t>(config.n_chains);
  std::vector<ChainResult> chains(n_chains);
  Execution chain_exec = exec;
#ifdef _OPENMP
  if (omp_in_parallel()) chain_exec.threads = 1;
#endif
  for_each_index(n_chains, chain_exec, [&](std::size_t c) {
    CounterRng rng(config.seed.child({static_cast<std::uint64_t>(c)}));
    Eigen::VectorXd init(6);
    Eigen::VectorXd g(6);
    bool ok = false;
    for (int attempt = 0; attempt < kInitAttempts && !ok; ++attempt) {
      const auto phi = sample_prior(prior, rng).to_array();
      for (int k = 0; k < 6; ++k) init[k] = std::log(phi[static_cast<std::size_t>(k)]);
      ok = std::isfinite(target(init, g)) && g.allFinite();
    }
    if (!ok) {
      throw InitialisationError("sample_posterior: no finite initial point in " +
                                std::to_string(kInitAttempts) + " prior draws");
    }
    chains[c] = run_nuts_chain(target, init, settings, rng);
  });

  PosteriorRun run;
  auto& d = run.draws;
  d.n_chains = config.n_chains;
  d.iter_sampling = config.iter_sampling;
  const Eigen::Index rows =
      static_cast<Eigen::Index>(config.n_chains) * config.iter_sampling;
  d.values.resize(rows, col::kCount);
  d.chain.resize(static_cast<std::size_t>(rows));
  d.lp.resize(static_cast<std::size_t>(rows));
  for (std::size_t c = 0; c < n_chains; ++c) {
    const auto& ch = chains[c];
    run.diagnostics.n_divergent += ch.n_divergent;
    run.diagnostics.n_depth_saturated += ch.n_depth_saturated;
    run.diagnostics.step_size.push_back(ch.step_size);
    for (int i = 0; i < config.iter_sampling; ++i) {
      const Eigen::Index row =
          static_cast<Eigen::Index>(c) * config.iter_sampling + i;
      std::array<double, 6> v{};
      for (int k = 0; k < 6; ++k) {
        v[static_cast<std::size_t>(k)] = std::exp(ch.draws(i, k));
      }
      fill_row(d.values, row, PhiParams::from_array(v, prior.q), design, p);
      d.chain[static_cast<std::size_t>(row)] = static_cast<int>(c);
      d.lp[static_cast<std::size_t>(row)] = ch.log_density[static_cast<std::size_t>(i)];
    }
  }
  const auto diag = diagnose(run.draws);
  run.diagnostics.quantity = diag.quantity;
  run.diagnostics.lp = diag.lp;
  return run;
}

const char* status_name(FitStatus s) {
  switch (s) {
    case FitStatus::Ok:
      return "ok";
    case FitStatus::Refitted:
      return "refitted";
    case FitStatus::Discarded:
      break;
  }
  return "discarded";
}

bool needs_refit(const PosteriorRun& run, int n_chains) {
  const auto& d = run.diagnostics;
  if (d.n_divergent > 0) return true;
  const double ess_floor = 100.0 * n_chains;
  for (int k = 0; k < col::kCount; ++k) {
    const auto& q = d.quantity[static_cast<std::size_t>(k)];
    if (!(q.rhat <= 1.01)) return true;
    if (!(q.ess_bulk >= ess_floor) || !(q.ess_tail >= ess_floor)) return true;
    const auto column = run.draws.values.col(k);
    const double mean = column.mean();
    const double sd = std::sqrt((column.array() - mean).square().sum() /
                                (static_cast<double>(column.size()) - 1.0));
    if (!std::isfinite(sd) || sd > 1e6) return true;
  }
  return false;
}

RefitResult sample_with_refit(const Dataset* data, const DesignSpec& design,
                              const GammaPrior& prior, double p,
                              const SamplerConfig& config, Execution exec) {
  RefitResult out;
  out.run = sample_posterior(data, design, prior, p, config, exec);
  if (!needs_refit(out.run, config.n_chains)) return out;
  SamplerConfig second = config.escalated();
  second.seed = config.seed.child({0x5e});
  out.run = sample_posterior(data, design, prior, p, second, exec);
  out.status = needs_refit(out.run, second.n_chains) ? FitStatus::Discarded
                                                     : FitStatus::Refitted;
  return out;
}

std::vector<SummaryRow> summarise(const PosteriorDraws& draws,
                                  const Diagnostics& diag) {
  auto row_of = [](const std::string& name, std::vector<double> v,
                   const QuantityDiagnostics& q) {
    SummaryRow r;
    r.name = name;
    const double n = static_cast<double>(v.size());
    double s = 0.0;
    for (double x : v) s += x;
    r.mean = s / n;
    double ss = 0.0;
    for (double x : v) ss += (x - r.mean) * (x - r.mean);
    r.sd = std::sqrt(ss / (n - 1.0));
    std::sort(v.begin(), v.end());
    r.median = quantile_sorted(v, 0.5);
    r.q5 = quantile_sorted(v, 0.05);
    r.q95 = quantile_sorted(v, 0.95);
    std::vector<double> dev(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) dev[i] = std::abs(v[i] - r.median);
    std::sort(dev.begin(), dev.end());
    r.mad = 1.4826 * quantile_sorted(dev, 0.5);
    r.rhat = q.rhat;
    r.ess_bulk = q.ess_bulk;
    r.ess_tail = q.ess_tail;
    return r;
  };
  std::vector<SummaryRow> out;
  out.push_back(row_of("lp__", draws.lp, diag.lp));
  const auto& names = quantity_names();
  for (int k = 0; k < col::kCount; ++k) {
    const auto c = draws.values.col(k);
    out.push_back(row_of(names[static_cast<std::size_t>(k)],
                         std::vector<double>(c.data(), c.data() + c.size()),
                         diag.quantity[static_cast<std::size_t>(k)]));
  }
  return out;
}

}  // namespace ssalt
