#include "ssalt/nuts.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ssalt/errors.hpp"

namespace ssalt {

namespace {

using Vec = Eigen::VectorXd;
constexpr double kInf = std::numeric_limits<double>::infinity();

double log_sum_exp(double a, double b) {
  if (a == -kInf) return b;
  if (b == -kInf) return a;
  const double m = std::max(a, b);
  return m + std::log(std::exp(a - m) + std::exp(b - m));
}

struct PhasePoint {
  Vec q;
  Vec p;
  Vec grad;
  double log_density = 0.0;
};

class Sampler {
 public:
  Sampler(const LogDensity& target, const NutsSettings& settings,
          CounterRng& rng, Eigen::Index dim)
      : target_(target),
        settings_(settings),
        rng_(rng),
        inv_metric_(Vec::Ones(dim)) {}

  void set_position(const Vec& q) {
    z_.q = q;
    z_.grad.resize(q.size());
    z_.log_density = evaluate(z_.q, z_.grad);
    if (!std::isfinite(z_.log_density) || !z_.grad.allFinite()) {
      throw InitialisationError("nuts: initial point has non-finite density");
    }
    z_.p = Vec::Zero(q.size());
  }

  const PhasePoint& state() const { return z_; }
  double step_size() const { return eps_; }
  void set_step_size(double e) { eps_ = e; }
  const Vec& inv_metric() const { return inv_metric_; }
  void set_inv_metric(const Vec& m) { inv_metric_ = m; }

  struct Transition {
    double accept_stat = 0.0;
    int depth = 0;
    bool divergent = false;
  };

  // Heuristic from the reference implementation: double or halve eps until
  // the one-step acceptance crosses 0.8.
  void init_step_size() {
    const PhasePoint start = z_;
    sample_momentum();
    double h0 = hamiltonian(z_);
    leapfrog(z_, eps_);
    double delta = h0 - finite_or_inf(hamiltonian(z_));
    const int direction = delta > std::log(0.8) ? 1 : -1;
    for (;;) {
      z_ = start;
      sample_momentum();
      h0 = hamiltonian(z_);
      leapfrog(z_, eps_);
      delta = h0 - finite_or_inf(hamiltonian(z_));
      if (direction == 1 && !(delta > std::log(0.8))) break;
      if (direction == -1 && !(delta < std::log(0.8))) break;
      eps_ = direction == 1 ? 2.0 * eps_ : 0.5 * eps_;
      if (eps_ > 1e7) {
        throw SolverError("nuts: step size diverged; posterior may be improper");
      }
      if (eps_ == 0.0) {
        throw SolverError("nuts: step size collapsed to zero");
      }
    }
    z_ = start;
  }

  Transition transition() {
    sample_momentum();
    const Eigen::Index n = z_.q.size();
    PhasePoint z_fwd = z_;
    PhasePoint z_bck = z_;
    PhasePoint z_sample = z_;
    PhasePoint z_propose = z_;

    Vec p_fwd_fwd = z_.p, p_fwd_bck = z_.p, p_bck_fwd = z_.p,
        p_bck_bck = z_.p;
    const Vec sharp0 = inv_metric_.cwiseProduct(z_.p);
    Vec ps_fwd_fwd = sharp0, ps_fwd_bck = sharp0, ps_bck_fwd = sharp0,
        ps_bck_bck = sharp0;
    Vec rho = z_.p;
    double log_sum_weight = 0.0;
    const double h0 = hamiltonian(z_);

    n_leapfrog_ = 0;
    sum_metro_prob_ = 0.0;
    divergent_ = false;
    int depth = 0;

    while (depth < settings_.max_depth) {
      Vec rho_fwd = Vec::Zero(n);
      Vec rho_bck = Vec::Zero(n);
      bool valid = false;
      double lsw_subtree = -kInf;
      if (rng_.uniform() > 0.5) {
        z_ = z_fwd;
        rho_bck = rho;
        p_bck_fwd = p_fwd_bck;
        ps_bck_fwd = ps_fwd_bck;
        valid = build_tree(depth, z_propose, ps_fwd_bck, ps_fwd_fwd, rho_fwd,
                           p_fwd_bck, p_fwd_fwd, h0, 1.0, lsw_subtree);
        z_fwd = z_;
      } else {
        z_ = z_bck;
        rho_fwd = rho;
        p_fwd_bck = p_bck_fwd;
        ps_fwd_bck = ps_bck_fwd;
        valid = build_tree(depth, z_propose, ps_bck_fwd, ps_bck_bck, rho_bck,
                           p_bck_fwd, p_bck_bck, h0, -1.0, lsw_subtree);
        z_bck = z_;
      }
      if (!valid) break;
      ++depth;

      if (lsw_subtree > log_sum_weight) {
        z_sample = z_propose;
      } else if (rng_.uniform() < std::exp(lsw_subtree - log_sum_weight)) {
        z_sample = z_propose;
      }
      log_sum_weight = log_sum_exp(log_sum_weight, lsw_subtree);

      rho = rho_bck + rho_fwd;
      bool persist = criterion(ps_bck_bck, ps_fwd_fwd, rho);
      persist = persist && criterion(ps_bck_bck, ps_fwd_bck, rho_bck + p_fwd_bck);
      persist = persist && criterion(ps_bck_fwd, ps_fwd_fwd, rho_fwd + p_bck_fwd);
      if (!persist) break;
    }

    z_ = z_sample;
    Transition t;
    t.depth = depth;
    t.divergent = divergent_;
    t.accept_stat = n_leapfrog_ > 0 ? sum_metro_prob_ / n_leapfrog_ : 0.0;
    return t;
  }

 private:
  static double finite_or_inf(double h) { return std::isnan(h) ? kInf : h; }

  static bool criterion(const Vec& sharp_minus, const Vec& sharp_plus,
                        const Vec& rho) {
    return sharp_plus.dot(rho) > 0.0 && sharp_minus.dot(rho) > 0.0;
  }

  double evaluate(const Vec& q, Vec& grad) {
    const double lp = target_(q, grad);
    return std::isnan(lp) ? -kInf : lp;
  }

  void sample_momentum() {
    for (Eigen::Index i = 0; i < z_.p.size(); ++i) {
      z_.p[i] = rng_.normal() / std::sqrt(inv_metric_[i]);
    }
  }

  double hamiltonian(const PhasePoint& z) const {
    return -z.log_density + 0.5 * z.p.dot(inv_metric_.cwiseProduct(z.p));
  }

  void leapfrog(PhasePoint& z, double eps) {
    z.p += 0.5 * eps * z.grad;
    z.q += eps * inv_metric_.cwiseProduct(z.p);
    z.log_density = evaluate(z.q, z.grad);
    if (!std::isfinite(z.log_density) || !z.grad.allFinite()) {
      // Outside the support: leave the energy infinite so the step counts
      // as a divergence.
      z.log_density = -kInf;
      z.grad.setZero();
      return;
    }
    z.p += 0.5 * eps * z.grad;
  }

  bool build_tree(int depth, PhasePoint& z_propose, Vec& sharp_beg,
                  Vec& sharp_end, Vec& rho, Vec& p_beg, Vec& p_end, double h0,
                  double sign, double& log_sum_weight) {
    if (depth == 0) {
      leapfrog(z_, sign * eps_);
      ++n_leapfrog_;
      const double h = finite_or_inf(hamiltonian(z_));
      if (h - h0 > settings_.max_energy_error) divergent_ = true;
      log_sum_weight = log_sum_exp(log_sum_weight, h0 - h);
      sum_metro_prob_ += h0 - h > 0.0 ? 1.0 : std::exp(h0 - h);
      z_propose = z_;
      sharp_beg = inv_metric_.cwiseProduct(z_.p);
      sharp_end = sharp_beg;
      rho += z_.p;
      p_beg = z_.p;
      p_end = p_beg;
      return !divergent_;
    }

    const Eigen::Index n = z_.q.size();
    // Left half.
    Vec rho_init = Vec::Zero(n);
    Vec p_init_end(n), sharp_init_end(n);
    double lsw_init = -kInf;
    if (!build_tree(depth - 1, z_propose, sharp_beg, sharp_init_end, rho_init,
                    p_beg, p_init_end, h0, sign, lsw_init)) {
      return false;
    }
    // Right half.
    PhasePoint z_propose_final = z_;
    Vec rho_final = Vec::Zero(n);
    Vec p_final_beg(n), sharp_final_beg(n);
    double lsw_final = -kInf;
    if (!build_tree(depth - 1, z_propose_final, sharp_final_beg, sharp_end,
                    rho_final, p_final_beg, p_end, h0, sign, lsw_final)) {
      return false;
    }

    const double lsw_subtree = log_sum_exp(lsw_init, lsw_final);
    log_sum_weight = log_sum_exp(log_sum_weight, lsw_subtree);
    if (lsw_final > lsw_subtree) {
      z_propose = z_propose_final;
    } else if (rng_.uniform() < std::exp(lsw_final - lsw_subtree)) {
      z_propose = z_propose_final;
    }

    const Vec rho_subtree = rho_init + rho_final;
    rho += rho_subtree;
    bool persist = criterion(sharp_beg, sharp_end, rho_subtree);
    persist = persist &&
              criterion(sharp_beg, sharp_final_beg, rho_init + p_final_beg);
    persist = persist &&
              criterion(sharp_init_end, sharp_end, rho_final + p_init_end);
    return persist;
  }

  const LogDensity& target_;
  const NutsSettings& settings_;
  CounterRng& rng_;
  Vec inv_metric_;
  PhasePoint z_;
  double eps_ = 1.0;
  int n_leapfrog_ = 0;
  double sum_metro_prob_ = 0.0;
  bool divergent_ = false;
};

class DualAveraging {
 public:
  explicit DualAveraging(double delta) : delta_(delta) {}

  void restart(double eps) {
    mu_ = std::log(10.0 * eps);
    counter_ = 0.0;
    s_bar_ = 0.0;
    x_bar_ = 0.0;
  }

  double learn(double accept_stat) {
    counter_ += 1.0;
    accept_stat = std::min(1.0, accept_stat);
    const double eta = 1.0 / (counter_ + kT0);
    s_bar_ = (1.0 - eta) * s_bar_ + eta * (delta_ - accept_stat);
    const double x = mu_ - s_bar_ * std::sqrt(counter_) / kGamma;
    const double x_eta = std::pow(counter_, -kKappa);
    x_bar_ = (1.0 - x_eta) * x_bar_ + x_eta * x;
    return std::exp(x);
  }

  double final_step_size() const { return std::exp(x_bar_); }

 private:
  static constexpr double kGamma = 0.05;
  static constexpr double kT0 = 10.0;
  static constexpr double kKappa = 0.75;
  double delta_;
  double mu_ = 0.0;
  double counter_ = 0.0;
  double s_bar_ = 0.0;
  double x_bar_ = 0.0;
};

// Warmup schedule: a fast initial buffer, doubling slow windows that
// estimate the metric, and a final fast buffer.
class MetricWindows {
 public:
  MetricWindows(int num_warmup, Eigen::Index dim)
      : num_warmup_(num_warmup), sum_(Vec::Zero(dim)), sum_sq_(Vec::Zero(dim)) {
    if (num_warmup < 20) {
      enabled_ = false;
      return;
    }
    if (init_buffer_ + base_window_ + term_buffer_ > num_warmup) {
      init_buffer_ = static_cast<int>(0.15 * num_warmup);
      term_buffer_ = static_cast<int>(0.1 * num_warmup);
      base_window_ = num_warmup - (init_buffer_ + term_buffer_);
    }
    window_size_ = base_window_;
    next_window_ = init_buffer_ + window_size_ - 1;
  }

  // Returns true when a window closes and var holds a new metric.
  bool learn(const Vec& q, Vec& var) {
    if (!enabled_) return false;
    if (in_window()) add(q);
    if (counter_ == next_window_ && counter_ != num_warmup_) {
      compute_next_window();
      const double n = count_;
      const Vec mean = sum_ / n;
      Vec v = (sum_sq_ - n * mean.cwiseProduct(mean)) / (n - 1.0);
      var = (n / (n + 5.0)) * v.array() + 1e-3 * (5.0 / (n + 5.0));
      sum_.setZero();
      sum_sq_.setZero();
      count_ = 0;
      ++counter_;
      return true;
    }
    ++counter_;
    return false;
  }

 private:
  bool in_window() const {
    return counter_ >= init_buffer_ && counter_ < num_warmup_ - term_buffer_ &&
           counter_ != num_warmup_;
  }

  void add(const Vec& q) {
    sum_ += q;
    sum_sq_ += q.cwiseProduct(q);
    ++count_;
  }

  void compute_next_window() {
    const int last = num_warmup_ - term_buffer_ - 1;
    if (next_window_ == last) return;
    window_size_ *= 2;
    next_window_ = counter_ + window_size_;
    if (next_window_ != last && next_window_ + 2 * window_size_ >= last + 1) {
      next_window_ = last;
    }
  }

  int num_warmup_;
  bool enabled_ = true;
  int init_buffer_ = 75;
  int term_buffer_ = 50;
  int base_window_ = 25;
  int window_size_ = 0;
  int next_window_ = 0;
  int counter_ = 0;
  Vec sum_;
  Vec sum_sq_;
  int count_ = 0;
};

}  // namespace

ChainResult run_nuts_chain(const LogDensity& target, Eigen::VectorXd init,
                           const NutsSettings& settings, CounterRng& rng) {
  if (settings.iter_warmup < 0 || settings.iter_sampling < 1 ||
      settings.max_depth < 1 ||
      !(settings.target_accept > 0.0 && settings.target_accept < 1.0)) {
    throw ConfigError("mcmc", "invalid sampler settings");
  }
  const Eigen::Index dim = init.size();
  Sampler sampler(target, settings, rng, dim);
  sampler.set_position(init);
  sampler.init_step_size();

  ChainResult out;
  DualAveraging adapt(settings.target_accept);
  adapt.restart(sampler.step_size());
  MetricWindows windows(settings.iter_warmup, dim);

  for (int it = 0; it < settings.iter_warmup; ++it) {
    const auto t = sampler.transition();
    if (t.divergent) ++out.n_warmup_divergent;
    sampler.set_step_size(adapt.learn(t.accept_stat));
    if (settings.adapt_metric) {
      Vec var = sampler.inv_metric();
      if (windows.learn(sampler.state().q, var)) {
        sampler.set_inv_metric(var);
        sampler.init_step_size();
        adapt.restart(sampler.step_size());
      }
    }
  }
  if (settings.iter_warmup > 0) sampler.set_step_size(adapt.final_step_size());

  const auto n = static_cast<std::size_t>(settings.iter_sampling);
  out.draws.resize(settings.iter_sampling, dim);
  out.log_density.resize(n);
  out.accept_stat.resize(n);
  out.tree_depth.resize(n);
  out.divergent.resize(n);
  for (std::size_t it = 0; it < n; ++it) {
    const auto t = sampler.transition();
    const auto row = static_cast<Eigen::Index>(it);
    out.draws.row(row) = sampler.state().q.transpose();
    out.log_density[it] = sampler.state().log_density;
    out.accept_stat[it] = t.accept_stat;
    out.tree_depth[it] = t.depth;
    out.divergent[it] = t.divergent ? 1 : 0;
    if (t.divergent) ++out.n_divergent;
    if (t.depth >= settings.max_depth) ++out.n_depth_saturated;
  }
  out.step_size = sampler.step_size();
  out.inv_metric = sampler.inv_metric();
  return out;
}

}  // namespace ssalt
