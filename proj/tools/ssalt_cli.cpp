// Command-line driver: fit, gof, elicit, diagnose, plan1d, plan2d, simulate.

#include <fmt/format.h>

#include <CLI11.hpp>
#include <filesystem>
#include <iostream>
#include <json.hpp>

#include "ssalt/config.hpp"
#include "ssalt/errors.hpp"
#include "ssalt/io.hpp"
#include "ssalt/likelihood.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace ssalt;

namespace {

struct Options {
  std::string config;
  std::string data;
  std::string out = "out";
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
  bool empty_data = false;
};

RunConfig resolve(const Options& o) {
  RunConfig c = o.config.empty() ? RunConfig{} : load_config(o.config);
  if (!o.data.empty()) {
    if (!c.data) c.data = DataBlock{};
    c.data->path = o.data;
  }
  if (o.seed) c.seed = *o.seed;
  if (o.threads) c.threads = *o.threads;
  return c;
}

Dataset load_data(const RunConfig& c) {
  const auto& d = c.require_data();
  if (d.path.empty()) {
    throw ConfigError("config", "no data file: pass --data or set data.path");
  }
  return io::read_dataset_csv(d.path, d.design);
}

json params_json(const ModelParams& p) {
  const auto v = p.to_array();
  return {{"a1", v[0]}, {"b1", v[1]}, {"beta1", v[2]},
          {"a2", v[3]}, {"b2", v[4]}, {"beta2", v[5]}};
}

json prior_json(const GammaPrior& p) {
  json alpha = json::array();
  json lambda = json::array();
  for (const auto& c : p.component) {
    alpha.push_back(c.alpha);
    lambda.push_back(c.lambda);
  }
  return {{"flavour", std::string(flavour_name(p.flavour))},
          {"q", p.q},
          {"alpha", alpha},
          {"lambda", lambda}};
}

void write_json(const fs::path& path, const json& j) {
  io::write_text(path, j.dump(2) + "\n");
}

MleFit fit_or_throw(const Dataset& data) {
  auto fit = fit_mle(data);
  if (!fit.converged) {
    throw SolverError("fit: optimiser did not reach |grad| < 1e-4");
  }
  return fit;
}

int cmd_fit(const Options& o) {
  const auto c = resolve(o);
  const auto data = load_data(c);
  const auto fit = fit_mle(data);
  const auto v = fit.params.to_array();
  const char* names[] = {"a1", "b1", "beta1", "a2", "b2", "beta2"};
  fmt::print("{:<8} {:>12}\n", "param", "estimate");
  for (std::size_t k = 0; k < 6; ++k) {
    fmt::print("{:<8} {:>12}\n", names[k], io::fmt6(v[k]));
  }
  fmt::print("loglik {}  converged {}  iterations {}\n", io::fmt6(fit.loglik),
             fit.converged, fit.iterations);
  write_json(fs::path(o.out) / "summary.json",
             {{"command", "fit"},
              {"params", params_json(fit.params)},
              {"loglik", fit.loglik},
              {"converged", fit.converged},
              {"iterations", fit.iterations}});
  return fit.converged ? 0 : 3;
}

int cmd_gof(const Options& o) {
  const auto c = resolve(o);
  const auto data = load_data(c);
  const auto fit = fit_or_throw(data);
  const auto g = gof_bootstrap(data, fit, c.gof_n_boot, RngSeed{c.seed, 1},
                               Execution{c.threads});
  fmt::print("KS  {}  p = {}\nCvM {}  p = {}\nn_boot {}  regenerated {}\n",
             io::fmt6(g.ks_stat), io::fmt6(g.ks_pvalue), io::fmt6(g.cvm_stat),
             io::fmt6(g.cvm_pvalue), g.n_boot, g.n_regenerated);
  io::write_edf_csv(fs::path(o.out) / "edf_curve.csv",
                    edf_curve(data, fit.params));
  write_json(fs::path(o.out) / "summary.json",
             {{"command", "gof"},
              {"params", params_json(fit.params)},
              {"ks_stat", g.ks_stat},
              {"cvm_stat", g.cvm_stat},
              {"ks_pvalue", g.ks_pvalue},
              {"cvm_pvalue", g.cvm_pvalue},
              {"n_boot", g.n_boot},
              {"n_regenerated", g.n_regenerated}});
  return 0;
}

int cmd_elicit(const Options& o) {
  const auto c = resolve(o);
  const auto data = load_data(c);
  const auto fit = fit_or_throw(data);
  const double q = c.prior ? c.prior->q : 0.01;
  const auto s = elicit_bootstrap(data, fit, c.elicit_n_reps, q,
                                  RngSeed{c.seed, 2}, Execution{c.threads});
  const char* names[] = {"phi11", "phi21", "phi31", "phi12", "phi22", "phi32"};
  fmt::print("{:<10} {:>10} {:>10}\n", "component", "mean", "se");
  json boot = json::object();
  for (std::size_t k = 0; k < 6; ++k) {
    fmt::print("{:<10} {:>10} {:>10}\n", names[k], io::fmt6(s.mean[k]),
               io::fmt6(s.se[k]));
  }
  json quantiles = json::array();
  for (std::size_t k = 0; k < 3; ++k) {
    fmt::print("t_{:<8} {:>10} {:>10}\n", io::fmt6(s.quantile_p[k]),
               io::fmt6(s.quantile_mean[k]), io::fmt6(s.quantile_se[k]));
    quantiles.push_back({{"p", s.quantile_p[k]},
                         {"mean", s.quantile_mean[k]},
                         {"se", s.quantile_se[k]}});
  }
  json priors = json::object();
  for (auto f : {PriorFlavour::I, PriorFlavour::II, PriorFlavour::III}) {
    const auto prior = build_prior(s, f);
    priors[std::string(flavour_name(f))] = prior_json(prior);
    fmt::print("Prior {}:", flavour_name(f));
    for (const auto& g : prior.component) {
      fmt::print(" ({}, {})", io::fmt6(g.alpha), io::fmt6(g.lambda));
    }
    fmt::print("\n");
  }
  write_json(fs::path(o.out) / "summary.json",
             {{"command", "elicit"},
              {"q", q},
              {"n_valid", s.n_valid},
              {"n_regenerated", s.n_regenerated},
              {"bootstrap", {{"mean", s.mean}, {"se", s.se}}},
              {"quantiles", quantiles},
              {"priors", priors}});
  return 0;
}

int cmd_diagnose(const Options& o) {
  const auto c = resolve(o);
  const auto& prior = c.require_prior();
  std::optional<Dataset> data;
  DesignSpec design = c.data ? c.data->design : DataBlock{}.design;
  if (!o.empty_data) data = load_data(c);
  SamplerConfig cfg = c.sampler;
  cfg.seed = RngSeed{c.seed, 3};
  const auto run = sample_posterior(data ? &*data : nullptr, design, prior,
                                    c.diagnose_p, cfg, Execution{c.threads});
  const auto rows = summarise(run.draws, run.diagnostics);
  fmt::print("{:<14}{:>10}{:>10}{:>10}{:>10}{:>10}{:>10}{:>8}{:>9}{:>9}\n",
             "variable", "mean", "median", "sd", "mad", "q5", "q95", "rhat",
             "ess_bulk", "ess_tail");
  json table = json::array();
  for (const auto& r : rows) {
    fmt::print("{:<14}{:>10}{:>10}{:>10}{:>10}{:>10}{:>10}{:>8}{:>9}{:>9}\n",
               r.name, io::fmt6(r.mean), io::fmt6(r.median), io::fmt6(r.sd),
               io::fmt6(r.mad), io::fmt6(r.q5), io::fmt6(r.q95),
               io::fmt6(r.rhat), io::fmt6(r.ess_bulk), io::fmt6(r.ess_tail));
    table.push_back({{"variable", r.name}, {"mean", r.mean}, {"median", r.median},
                     {"sd", r.sd}, {"mad", r.mad}, {"q5", r.q5}, {"q95", r.q95},
                     {"rhat", r.rhat}, {"ess_bulk", r.ess_bulk},
                     {"ess_tail", r.ess_tail}});
  }
  const auto& d = run.diagnostics;
  fmt::print("divergences {}  depth saturated {}  max rhat {}\n", d.n_divergent,
             d.n_depth_saturated, io::fmt6(d.max_rhat()));
  const fs::path out(o.out);
  io::write_summary_csv(out / "posterior_summary.csv", rows);
  io::write_draws_csv(out / "draws.csv", run.draws);
  io::write_acf_csv(out / "acf.csv", run.draws, c.acf_lags);
  write_json(out / "summary.json",
             {{"command", "diagnose"},
              {"empty_data", o.empty_data},
              {"p", c.diagnose_p},
              {"x1", design.x1()},
              {"tau", design.tau()},
              {"prior", prior_json(prior)},
              {"n_divergent", d.n_divergent},
              {"n_depth_saturated", d.n_depth_saturated},
              {"max_rhat", d.max_rhat()},
              {"step_size", d.step_size},
              {"table", table}});
  return 0;
}

ModelParams planning_truth(const RunConfig& c) {
  if (c.plan.truth) return *c.plan.truth;
  return fit_or_throw(load_data(c)).params;
}

CriterionSetup planning_setup(const RunConfig& c) {
  CriterionSetup s;
  s.prior = c.require_prior();
  s.truth = planning_truth(c);
  s.p = c.plan.p;
  s.replicates = c.plan.replicates;
  s.sampler = c.sampler;
  return s;
}

std::vector<CriterionPoint> synthetic_grid(const RunConfig& c,
                                           const std::vector<double>& x1s) {
  const auto taus = linspace(c.plan.tau_grid.lo, c.plan.tau_grid.hi,
                             c.plan.tau_grid.m);
  const auto& c1 = *c.plan.synthetic_c1;
  const auto& c2 = *c.plan.synthetic_c2;
  if (c1.size() != taus.size() * x1s.size() || c2.size() != c1.size()) {
    throw ConfigError("design-criteria",
                      "synthetic values must have one entry per grid point");
  }
  std::vector<CriterionPoint> grid;
  std::size_t i = 0;
  for (double x : x1s) {
    for (double t : taus) {
      CriterionPoint p;
      p.x1 = x;
      p.tau = t;
      p.c1_raw = c1[i];
      p.c2_raw = c2[i];
      p.n_used = std::isnan(c1[i]) ? 0 : 1;
      grid.push_back(p);
      ++i;
    }
  }
  return grid;
}

void report_surface(const Options& o, const RunConfig& c, const char* command,
                    const CriterionSurface& s) {
  const fs::path out(o.out);
  io::write_grid_csv(out / "raw_grid.csv", s.grid);
  io::write_fine_csv(out / "smoothed.csv", s.fine);
  io::write_optimum_csv(out / "optimum.csv", s);
  json opt = json::array();
  const char* names[] = {"C1", "C2"};
  for (std::size_t k = 0; k < 2; ++k) {
    const auto& m = s.optimum[k];
    fmt::print("{}: x1 = {}  tau = {}  value = {}\n", names[k], io::fmt6(m.x1),
               io::fmt6(m.tau), io::fmt6(m.value));
    opt.push_back({{"criterion", names[k]}, {"x1", m.x1}, {"tau", m.tau},
                   {"value", m.value}});
  }
  int discarded = 0;
  int missing = 0;
  for (const auto& g : s.grid) {
    discarded += g.n_discarded;
    missing += g.missing() ? 1 : 0;
  }
  write_json(out / "summary.json",
             {{"command", command},
              {"synthetic", c.plan.synthetic_c1.has_value()},
              {"p", c.plan.p},
              {"replicates", c.plan.replicates},
              {"n", c.plan.n},
              {"h_tau", s.h_tau},
              {"h_x1", s.h_x1},
              {"discarded_replicates", discarded},
              {"missing_points", missing},
              {"optimum", opt}});
}

int cmd_plan1d(const Options& o) {
  const auto c = resolve(o);
  const auto& g = c.plan.tau_grid;
  const double h = grid_bandwidth(g.lo, g.hi, g.m);
  CriterionSurface s;
  if (c.plan.synthetic_c1) {
    s = smooth_and_optimise_1d(synthetic_grid(c, {c.plan.frame.x1()}), h);
  } else {
    const DesignSpec base(c.plan.frame, 0.5 * (g.lo + g.hi), c.plan.tc, c.plan.n);
    s = optimise_1d(base, g, planning_setup(c), RngSeed{c.seed, 4},
                    Execution{c.threads});
  }
  report_surface(o, c, "plan1d", s);
  return 0;
}

int cmd_plan2d(const Options& o) {
  const auto c = resolve(o);
  const auto& g = c.plan.tau_grid;
  CriterionSurface s;
  if (c.plan.synthetic_c1) {
    const auto& xs = c.plan.x1_grid;
    const auto [lo, hi] = std::minmax_element(xs.begin(), xs.end());
    const double h_x1 = xs.size() > 1 ? (*hi - *lo) / (xs.size() - 1.0) : 1.0;
    s = smooth_and_optimise_2d(synthetic_grid(c, xs), h_x1,
                               grid_bandwidth(g.lo, g.hi, g.m));
  } else {
    const DesignSpec base(c.plan.frame, 0.5 * (g.lo + g.hi), c.plan.tc, c.plan.n);
    s = optimise_2d(base, c.plan.x1_grid, g, planning_setup(c),
                    RngSeed{c.seed, 5}, Execution{c.threads});
  }
  report_surface(o, c, "plan2d", s);
  return 0;
}

int cmd_simulate(const Options& o) {
  const auto c = resolve(o);
  const DesignSpec design = c.data ? c.data->design : DataBlock{}.design;
  const ModelParams params =
      c.simulate_params ? *c.simulate_params : fit_or_throw(load_data(c)).params;
  const auto data = simulate_dataset(params, design, RngSeed{c.seed, 6});
  const fs::path path = fs::path(o.out) / "data.csv";
  io::write_dataset_csv(path, data);
  const auto counts = data.failure_counts();
  fmt::print("wrote {} ({} units, {} failures)\n", path.string(), data.size(),
             data.n_failures());
  write_json(fs::path(o.out) / "summary.json",
             {{"command", "simulate"},
              {"params", params_json(params)},
              {"n", data.size()},
              {"n_failures", data.n_failures()},
              {"failure_counts", counts}});
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bayesian step-stress ALT planner (two Weibull competing risks)"};
  app.require_subcommand(1);
  Options o;
  auto add_common = [&o](CLI::App* sub) {
    sub->add_option("--config", o.config, "JSON run configuration");
    sub->add_option("--data", o.data, "dataset CSV (time,cause); times in hundred hours");
    sub->add_option("--out", o.out, "output directory")->capture_default_str();
    sub->add_option("--seed", o.seed, "root seed (overrides the config)");
    sub->add_option("--threads", o.threads,
                    "worker threads; 1 selects the serial reference path")
        ->check(CLI::NonNegativeNumber);
  };
  struct Command {
    const char* name;
    const char* help;
    int (*run)(const Options&);
  };
  const Command commands[] = {
      {"fit", "maximum likelihood fit", cmd_fit},
      {"gof", "EDF goodness of fit with parametric bootstrap", cmd_gof},
      {"elicit", "bootstrap elicitation of Priors I, II, III", cmd_elicit},
      {"diagnose", "single posterior run with diagnostics", cmd_diagnose},
      {"plan1d", "one-variable optimal design over tau", cmd_plan1d},
      {"plan2d", "two-variable optimal design over (x1, tau)", cmd_plan2d},
      {"simulate", "simulate a dataset", cmd_simulate},
  };
  int (*selected)(const Options&) = nullptr;
  for (const auto& cmd : commands) {
    auto* sub = app.add_subcommand(cmd.name, cmd.help);
    add_common(sub);
    if (std::string(cmd.name) == "diagnose") {
      sub->add_flag("--empty-data", o.empty_data, "sample the prior only");
    }
    sub->callback([&selected, run = cmd.run] { selected = run; });
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }
  try {
    return selected(o);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
