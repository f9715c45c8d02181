#include "ssalt/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numeric>
#include <unsupported/Eigen/FFT>

namespace ssalt {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

ChainMatrix split_chains(const ChainMatrix& x) {
  const Eigen::Index n = x.rows();
  const Eigen::Index half = n / 2;
  ChainMatrix out(half, 2 * x.cols());
  for (Eigen::Index c = 0; c < x.cols(); ++c) {
    out.col(2 * c) = x.col(c).head(half);
    out.col(2 * c + 1) = x.col(c).tail(half);
  }
  return out;
}

// Normal scores of the pooled ranks (average ranks for ties).
ChainMatrix rank_normalise(const ChainMatrix& x) {
  const Eigen::Index total = x.size();
  std::vector<Eigen::Index> idx(static_cast<std::size_t>(total));
  std::iota(idx.begin(), idx.end(), 0);
  const double* v = x.data();
  std::stable_sort(idx.begin(), idx.end(),
                   [v](Eigen::Index a, Eigen::Index b) { return v[a] < v[b]; });
  ChainMatrix out(x.rows(), x.cols());
  double* o = out.data();
  std::size_t i = 0;
  while (i < idx.size()) {
    std::size_t j = i;
    while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]]) ++j;
    const double rank = 0.5 * (static_cast<double>(i) + static_cast<double>(j)) + 1.0;
    const double z =
        normal_quantile((rank - 0.375) / (static_cast<double>(total) + 0.25));
    for (std::size_t k = i; k <= j; ++k) o[idx[k]] = z;
    i = j + 1;
  }
  return out;
}

bool has_constant_chain(const ChainMatrix& x) {
  for (Eigen::Index c = 0; c < x.cols(); ++c) {
    if (x.col(c).maxCoeff() == x.col(c).minCoeff()) return true;
  }
  return false;
}

double rhat_of(const ChainMatrix& x) {
  const double n = static_cast<double>(x.rows());
  const Eigen::Index m = x.cols();
  Eigen::VectorXd means(m), vars(m);
  for (Eigen::Index c = 0; c < m; ++c) {
    means[c] = x.col(c).mean();
    vars[c] = (x.col(c).array() - means[c]).square().sum() / (n - 1.0);
  }
  const double w = vars.mean();
  const double b_over_n =
      m > 1 ? (means.array() - means.mean()).square().sum() / (m - 1.0) : 0.0;
  const double var_plus = (n - 1.0) / n * w + b_over_n;
  return std::sqrt(var_plus / w);
}

double ess_of(const ChainMatrix& x) {
  const Eigen::Index n = x.rows();
  const Eigen::Index m = x.cols();
  if (n < 4) return kNaN;
  std::vector<std::vector<double>> acov(static_cast<std::size_t>(m));
  Eigen::VectorXd means(m), vars(m);
  for (Eigen::Index c = 0; c < m; ++c) {
    acov[static_cast<std::size_t>(c)] = autocovariance(x.col(c));
    means[c] = x.col(c).mean();
    vars[c] = acov[static_cast<std::size_t>(c)][0] * n / (n - 1.0);
  }
  const double mean_var = vars.mean();
  double var_plus = mean_var * (n - 1.0) / n;
  if (m > 1) {
    var_plus += (means.array() - means.mean()).square().sum() / (m - 1.0);
  }
  auto mean_acov = [&](Eigen::Index t) {
    double s = 0.0;
    for (const auto& a : acov) s += a[static_cast<std::size_t>(t)];
    return s / static_cast<double>(m);
  };

  std::vector<double> rho(static_cast<std::size_t>(n), 0.0);
  double rho_even = 1.0;
  double rho_odd = 1.0 - (mean_var - mean_acov(1)) / var_plus;
  rho[0] = rho_even;
  rho[1] = rho_odd;
  Eigen::Index t = 1;
  while (t < n - 5 && !std::isnan(rho_even + rho_odd) && rho_even + rho_odd > 0.0) {
    rho_even = 1.0 - (mean_var - mean_acov(t + 1)) / var_plus;
    rho_odd = 1.0 - (mean_var - mean_acov(t + 2)) / var_plus;
    if (rho_even + rho_odd >= 0.0) {
      rho[static_cast<std::size_t>(t + 1)] = rho_even;
      rho[static_cast<std::size_t>(t + 2)] = rho_odd;
    }
    t += 2;
  }
  const Eigen::Index max_t = t;
  if (rho_even > 0.0) rho[static_cast<std::size_t>(max_t + 1)] = rho_even;

  // Initial monotone sequence.
  t = 1;
  while (t <= max_t - 2) {
    const auto u = static_cast<std::size_t>(t);
    if (rho[u + 1] + rho[u + 2] > rho[u - 1] + rho[u]) {
      rho[u + 1] = (rho[u - 1] + rho[u]) / 2.0;
      rho[u + 2] = rho[u + 1];
    }
    t += 2;
  }
  const double total = static_cast<double>(n * m);
  double tau = -1.0;
  for (Eigen::Index k = 0; k <= max_t; ++k) tau += 2.0 * rho[static_cast<std::size_t>(k)];
  tau += rho[static_cast<std::size_t>(max_t + 1)];
  tau = std::max(tau, 1.0 / std::log10(total));
  return total / tau;
}

double quantile_of(std::vector<double> v, double p) {
  // Linear interpolation between order statistics.
  std::sort(v.begin(), v.end());
  const double h = (static_cast<double>(v.size()) - 1.0) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (h - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

double ess_tail_of(const ChainMatrix& split) {
  std::vector<double> pooled(split.data(), split.data() + split.size());
  double ess = std::numeric_limits<double>::infinity();
  for (double prob : {0.05, 0.95}) {
    const double q = quantile_of(pooled, prob);
    const ChainMatrix ind = (split.array() <= q).cast<double>();
    if (has_constant_chain(ind)) return kNaN;
    ess = std::min(ess, ess_of(ind));
  }
  return ess;
}

}  // namespace

double normal_quantile(double p) {
  // Acklam's rational approximation refined by one Halley step.
  static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                             -2.759285104469687e+02, 1.383577518672690e+02,
                             -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                             -1.556989798598866e+02, 6.680131188771972e+01,
                             -1.328068155288572e+01};
  static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                             -2.400758277161838e+00, -2.549732539343734e+00,
                             4.374664141464968e+00, 2.938163982698783e+00};
  static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                             2.445134137142996e+00, 3.754408661907416e+00};
  if (!(p > 0.0 && p < 1.0)) return kNaN;
  double x;
  if (p < 0.02425) {
    const double q = std::sqrt(-2.0 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else if (p > 1.0 - 0.02425) {
    const double q = std::sqrt(-2.0 * std::log1p(-p));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else {
    const double q = p - 0.5;
    const double r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) *
        q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  }
  const double e = 0.5 * std::erfc(-x / std::sqrt(2.0)) - p;
  const double u = e * std::sqrt(2.0 * M_PI) * std::exp(x * x / 2.0);
  return x - u / (1.0 + x * u / 2.0);
}

std::vector<double> autocovariance(const Eigen::VectorXd& x) {
  const Eigen::Index n = x.size();
  if (n == 0) return {};
  Eigen::Index padded = 1;
  while (padded < 2 * n) padded *= 2;
  std::vector<double> y(static_cast<std::size_t>(padded), 0.0);
  const double mean = x.mean();
  for (Eigen::Index i = 0; i < n; ++i) y[static_cast<std::size_t>(i)] = x[i] - mean;
  Eigen::FFT<double> fft;
  std::vector<std::complex<double>> freq;
  fft.fwd(freq, y);
  for (auto& f : freq) f = std::norm(f);
  std::vector<double> back;
  fft.inv(back, freq);
  std::vector<double> out(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    out[static_cast<std::size_t>(i)] = back[static_cast<std::size_t>(i)] / n;
  }
  return out;
}

std::vector<double> autocorrelation(const Eigen::VectorXd& x, int max_lag) {
  const auto acov = autocovariance(x);
  std::vector<double> out;
  for (int k = 1; k <= max_lag; ++k) {
    if (static_cast<std::size_t>(k) >= acov.size() || acov[0] == 0.0) {
      out.push_back(kNaN);
    } else {
      out.push_back(acov[static_cast<std::size_t>(k)] / acov[0]);
    }
  }
  return out;
}

double split_rhat(const ChainMatrix& draws) {
  const ChainMatrix s = split_chains(draws);
  if (s.rows() < 2 || has_constant_chain(s)) return kNaN;
  return rhat_of(s);
}

double ess_basic(const ChainMatrix& draws) {
  if (draws.rows() < 4 || has_constant_chain(draws)) return kNaN;
  return ess_of(draws);
}

QuantityDiagnostics diagnose_quantity(const ChainMatrix& draws) {
  QuantityDiagnostics d;
  const ChainMatrix split = split_chains(draws);
  if (split.rows() < 4 || has_constant_chain(split) || !split.allFinite()) {
    d.rhat = d.ess_bulk = d.ess_tail = kNaN;
    d.degenerate = true;
    return d;
  }
  const ChainMatrix z = rank_normalise(split);
  std::vector<double> pooled(split.data(), split.data() + split.size());
  const double med = quantile_of(pooled, 0.5);
  const ChainMatrix folded = (split.array() - med).abs().matrix();
  const double rhat_bulk = rhat_of(z);
  const double rhat_tail =
      has_constant_chain(folded) ? kNaN : rhat_of(rank_normalise(folded));
  d.rhat = std::max(rhat_bulk, rhat_tail);
  d.ess_bulk = ess_of(z);
  d.ess_tail = ess_tail_of(split);
  return d;
}

}  // namespace ssalt
