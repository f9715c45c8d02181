#include "ssalt/config.hpp"

#include <fstream>
#include "json.hpp"
#include <sstream>

#include "ssalt/errors.hpp"

namespace ssalt {

namespace {

using nlohmann::json;

template <class T>
T get_or(const json& j, const char* key, T fallback, const char* module) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(module, std::string("field '") + key + "' has the wrong type");
  }
}

template <class T>
T require(const json& j, const char* key, const char* module) {
  if (!j.contains(key)) {
    throw ConfigError(module, std::string("missing field '") + key + "'");
  }
  return get_or<T>(j, key, T{}, module);
}

std::array<double, 6> six(const json& j, const char* key, const char* module) {
  const auto v = require<std::vector<double>>(j, key, module);
  if (v.size() != 6) {
    throw ConfigError(module, std::string("'") + key + "' needs 6 values");
  }
  std::array<double, 6> a{};
  std::copy(v.begin(), v.end(), a.begin());
  return a;
}

StressFrame parse_frame(const json& j, const char* module) {
  const double t0 = require<double>(j, "T0", module);
  const double t1 = require<double>(j, "T1", module);
  const double t2 = require<double>(j, "T2", module);
  if (!(t0 > 0.0 && t0 <= t1 && t1 < t2)) {
    throw ConfigError(module, "temperatures must satisfy 0 < T0 <= T1 < T2");
  }
  return StressFrame::from_kelvin(t0, t1, t2);
}

ModelParams parse_params(const json& j, const char* key, const char* module) {
  const auto p = ModelParams::from_array(six(j, key, module));
  if (!p.valid()) {
    throw ConfigError(module, std::string("'") + key +
                                  "' needs b < 0 and beta > 0 for both risks");
  }
  return p;
}

GammaPrior parse_prior(const json& j) {
  const char* m = "prior";
  const double q = get_or<double>(j, "q", 0.01, m);
  if (!(q > 0.0 && q < 1.0)) throw ConfigError(m, "q must lie in (0, 1)");
  GammaPrior prior;
  if (j.contains("alpha") || j.contains("lambda")) {
    const auto a = six(j, "alpha", m);
    const auto l = six(j, "lambda", m);
    for (std::size_t k = 0; k < 6; ++k) prior.component[k] = {a[k], l[k]};
    prior.flavour = parse_flavour(get_or<std::string>(j, "flavour", "custom", m));
  } else {
    if (!j.contains("bootstrap")) {
      throw ConfigError(m, "give either alpha/lambda or bootstrap mean/se");
    }
    BootstrapSummary s;
    s.mean = six(j.at("bootstrap"), "mean", m);
    s.se = six(j.at("bootstrap"), "se", m);
    for (std::size_t k = 0; k < 6; ++k) {
      if (!(s.mean[k] > 0.0 && s.se[k] > 0.0)) {
        throw ConfigError(m, "bootstrap mean and se must be positive");
      }
    }
    const auto flavour = parse_flavour(require<std::string>(j, "flavour", m));
    if (flavour == PriorFlavour::Custom) {
      throw ConfigError(m, "flavour must be I, II or III with a bootstrap block");
    }
    prior = build_prior(s, flavour);
  }
  prior.q = q;
  prior.validate();
  return prior;
}

}  // namespace

const DataBlock& RunConfig::require_data() const {
  if (!data) throw ConfigError("config", "this command needs a 'data' block");
  return *data;
}

const GammaPrior& RunConfig::require_prior() const {
  if (!prior) throw ConfigError("config", "this command needs a 'prior' block");
  return *prior;
}

RunConfig parse_config(const std::string& json_text,
                       const std::filesystem::path& base_dir) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError("config", std::string("invalid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config", "top level must be an object");

  RunConfig c;
  c.seed = get_or<std::uint64_t>(j, "seed", c.seed, "config");
  c.threads = get_or<int>(j, "threads", 0, "config");
  if (c.threads < 0) throw ConfigError("config", "threads must be >= 0");

  if (j.contains("data")) {
    const auto& d = j.at("data");
    const char* m = "data";
    DataBlock block;
    if (d.contains("path")) {
      std::filesystem::path p = require<std::string>(d, "path", m);
      block.path = p.is_relative() && !base_dir.empty() ? base_dir / p : p;
    }
    const StressFrame frame =
        d.contains("frame") ? parse_frame(d.at("frame"), m) : block.design.frame();
    json design = d.contains("design") ? d.at("design") : json::object();
    const double tau = get_or<double>(design, "tau", 5.0, m);
    const double tc = get_or<double>(design, "tc", 6.0, m);
    const int n = get_or<int>(design, "n", 35, m);
    if (!(tau > 0.0 && tau < tc)) throw ConfigError(m, "need 0 < tau < tc");
    if (n < 1) throw ConfigError(m, "n must be >= 1");
    block.design = DesignSpec(frame, tau, tc, n);
    c.data = block;
  }

  if (j.contains("prior")) c.prior = parse_prior(j.at("prior"));

  if (j.contains("sampler")) {
    const auto& s = j.at("sampler");
    const char* m = "mcmc";
    c.sampler.n_chains = get_or<int>(s, "n_chains", c.sampler.n_chains, m);
    c.sampler.iter_warmup = get_or<int>(s, "iter_warmup", c.sampler.iter_warmup, m);
    c.sampler.iter_sampling =
        get_or<int>(s, "iter_sampling", c.sampler.iter_sampling, m);
    c.sampler.target_accept =
        get_or<double>(s, "target_accept", c.sampler.target_accept, m);
    c.sampler.max_depth = get_or<int>(s, "max_depth", c.sampler.max_depth, m);
    c.sampler.adapt_metric =
        get_or<bool>(s, "adapt_metric", c.sampler.adapt_metric, m);
  }
  c.sampler.validate();

  if (j.contains("gof")) {
    c.gof_n_boot = get_or<int>(j.at("gof"), "n_boot", c.gof_n_boot, "inference-mle");
  }
  if (c.gof_n_boot < 1) throw ConfigError("inference-mle", "n_boot must be >= 1");
  if (j.contains("elicit")) {
    c.elicit_n_reps =
        get_or<int>(j.at("elicit"), "n_reps", c.elicit_n_reps, "prior-elicit");
  }
  if (c.elicit_n_reps < 1) throw ConfigError("prior-elicit", "n_reps must be >= 1");
  if (j.contains("diagnose")) {
    c.diagnose_p = get_or<double>(j.at("diagnose"), "p", c.diagnose_p, "mcmc");
    c.acf_lags = get_or<int>(j.at("diagnose"), "acf_lags", c.acf_lags, "mcmc");
  }
  if (!(c.diagnose_p > 0.0 && c.diagnose_p < 1.0)) {
    throw ConfigError("mcmc", "p must lie in (0, 1)");
  }
  if (c.acf_lags < 1) throw ConfigError("mcmc", "acf_lags must be >= 1");

  if (j.contains("plan")) {
    const auto& p = j.at("plan");
    const char* m = "design-criteria";
    auto& plan = c.plan;
    if (p.contains("frame")) plan.frame = parse_frame(p.at("frame"), m);
    if (p.contains("design")) {
      plan.tc = get_or<double>(p.at("design"), "tc", plan.tc, m);
      plan.n = get_or<int>(p.at("design"), "n", plan.n, m);
    }
    plan.p = get_or<double>(p, "p", plan.p, m);
    plan.replicates = get_or<int>(p, "replicates", plan.replicates, m);
    if (p.contains("tau_grid")) {
      const auto& g = p.at("tau_grid");
      plan.tau_grid.lo = get_or<double>(g, "lo", plan.tau_grid.lo, m);
      plan.tau_grid.hi = get_or<double>(g, "hi", plan.tau_grid.hi, m);
      plan.tau_grid.m = get_or<int>(g, "m", plan.tau_grid.m, m);
    }
    plan.x1_grid = get_or<std::vector<double>>(p, "x1_grid", plan.x1_grid, m);
    if (p.contains("truth")) plan.truth = parse_params(p, "truth", m);
    if (p.contains("synthetic")) {
      const auto& s = p.at("synthetic");
      plan.synthetic_c1 = require<std::vector<double>>(s, "c1", m);
      plan.synthetic_c2 = get_or<std::vector<double>>(s, "c2", *plan.synthetic_c1, m);
    }
    if (!(plan.p > 0.0 && plan.p < 1.0)) throw ConfigError(m, "p must lie in (0, 1)");
    if (plan.replicates < 1) throw ConfigError(m, "replicates must be >= 1");
    if (plan.n < 1) throw ConfigError(m, "n must be >= 1");
    const auto& g = plan.tau_grid;
    if (g.m < 1) throw ConfigError(m, "tau_grid.m must be >= 1");
    if (!(g.lo > 0.0 && g.lo <= g.hi && g.hi < plan.tc)) {
      throw ConfigError(m, "tau grid needs 0 < lo <= hi < tc");
    }
    if (plan.x1_grid.empty()) throw ConfigError(m, "x1_grid is empty");
    for (double x : plan.x1_grid) {
      if (!(x >= 0.0 && x < 1.0)) throw ConfigError(m, "x1 values must lie in [0, 1)");
    }
  }

  if (j.contains("simulate")) {
    c.simulate_params = parse_params(j.at("simulate"), "params", "simulate");
  }
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config", "cannot open " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), path.parent_path());
}

}  // namespace ssalt
