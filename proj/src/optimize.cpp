#include "optimize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace ssalt::opt {

namespace {

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

double max_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

bool all_finite(const std::vector<double>& v) {
  return std::all_of(v.begin(), v.end(),
                     [](double x) { return std::isfinite(x); });
}

}  // namespace

Result minimize_bfgs(const Objective& f, std::vector<double> x0,
                     const BfgsOptions& options) {
  const std::size_t n = x0.size();
  Result res;
  res.x = std::move(x0);
  std::vector<double> g(n);
  res.value = f(res.x, g);
  if (!std::isfinite(res.value) || !all_finite(g)) {
    res.stalled = true;
    return res;
  }

  // Inverse Hessian approximation, row-major.
  std::vector<double> h(n * n, 0.0);
  auto reset = [&](double scale) {
    std::fill(h.begin(), h.end(), 0.0);
    for (std::size_t i = 0; i < n; ++i) h[i * n + i] = scale;
  };
  reset(1.0);
  bool scaled = false;

  std::vector<double> d(n), x_new(n), g_new(n), s(n), y(n), hy(n);
  for (int it = 0; it < options.max_iterations; ++it) {
    res.iterations = it;
    if (max_abs(g) < options.grad_tol) {
      res.converged = true;
      return res;
    }
    for (std::size_t i = 0; i < n; ++i) {
      d[i] = 0.0;
      for (std::size_t k = 0; k < n; ++k) d[i] -= h[i * n + k] * g[k];
    }
    double slope = dot(g, d);
    if (!(slope < 0.0)) {
      reset(1.0);
      scaled = false;
      for (std::size_t i = 0; i < n; ++i) d[i] = -g[i];
      slope = dot(g, d);
    }
    // Cap the first trial so log-scale coordinates cannot overflow.
    double step = std::min(1.0, 5.0 / std::max(max_abs(d), 1e-300));
    double f_new = std::numeric_limits<double>::infinity();
    bool accepted = false;
    for (int ls = 0; ls < 60; ++ls) {
      for (std::size_t i = 0; i < n; ++i) x_new[i] = res.x[i] + step * d[i];
      f_new = f(x_new, g_new);
      if (std::isfinite(f_new) && all_finite(g_new) &&
          f_new <= res.value + 1e-4 * step * slope) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) {
      res.stalled = true;
      return res;
    }
    for (std::size_t i = 0; i < n; ++i) {
      s[i] = x_new[i] - res.x[i];
      y[i] = g_new[i] - g[i];
    }
    const double sy = dot(s, y);
    if (sy > 1e-12 * std::sqrt(dot(s, s) * dot(y, y))) {
      if (!scaled) {
        reset(sy / dot(y, y));
        scaled = true;
      }
      // H <- (I - r s y') H (I - r y s') + r s s'
      const double r = 1.0 / sy;
      for (std::size_t i = 0; i < n; ++i) {
        hy[i] = 0.0;
        for (std::size_t k = 0; k < n; ++k) hy[i] += h[i * n + k] * y[k];
      }
      const double yhy = dot(y, hy);
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t k = 0; k < n; ++k) {
          h[i * n + k] += (1.0 + r * yhy) * r * s[i] * s[k] -
                          r * (hy[i] * s[k] + s[i] * hy[k]);
        }
      }
    }
    const double f_old = res.value;
    res.x = x_new;
    g = g_new;
    res.value = f_new;
    if (std::abs(f_old - f_new) <= 1e-16 * (1.0 + std::abs(f_new)) &&
        max_abs(s) <= 1e-14 * (1.0 + max_abs(res.x))) {
      res.converged = max_abs(g) < options.grad_tol;
      res.stalled = !res.converged;
      return res;
    }
  }
  res.iterations = options.max_iterations;
  res.converged = max_abs(g) < options.grad_tol;
  return res;
}

Result minimize_simplex(const Objective& f, std::vector<double> x0,
                        const SimplexOptions& options) {
  const std::size_t n = x0.size();
  std::vector<double> scratch(n);
  auto eval = [&](const std::vector<double>& x) {
    const double v = f(x, scratch);
    return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
  };

  std::vector<std::vector<double>> pts(n + 1, x0);
  for (std::size_t i = 0; i < n; ++i) pts[i + 1][i] += options.initial_step;
  std::vector<double> vals(n + 1);
  for (std::size_t i = 0; i <= n; ++i) vals[i] = eval(pts[i]);

  Result res;
  std::vector<std::size_t> order(n + 1);
  std::vector<double> centroid(n), trial(n), trial2(n);
  int it = 0;
  for (; it < options.max_iterations; ++it) {
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return vals[a] < vals[b]; });
    const std::size_t best = order.front();
    const std::size_t worst = order.back();
    const std::size_t second = order[n - 1];
    if (std::isfinite(vals[worst]) &&
        std::abs(vals[worst] - vals[best]) <=
            options.f_tol * (1.0 + std::abs(vals[best]))) {
      res.converged = true;
      break;
    }
    std::fill(centroid.begin(), centroid.end(), 0.0);
    for (std::size_t i = 0; i <= n; ++i) {
      if (i == worst) continue;
      for (std::size_t k = 0; k < n; ++k) centroid[k] += pts[i][k] / n;
    }
    auto along = [&](double coef, std::vector<double>& out) {
      for (std::size_t k = 0; k < n; ++k) {
        out[k] = centroid[k] + coef * (pts[worst][k] - centroid[k]);
      }
      return eval(out);
    };
    const double fr = along(-1.0, trial);
    if (fr < vals[best]) {
      const double fe = along(-2.0, trial2);
      if (fe < fr) {
        pts[worst] = trial2;
        vals[worst] = fe;
      } else {
        pts[worst] = trial;
        vals[worst] = fr;
      }
    } else if (fr < vals[second]) {
      pts[worst] = trial;
      vals[worst] = fr;
    } else {
      const double fc = fr < vals[worst] ? along(-0.5, trial2)
                                         : along(0.5, trial2);
      if (fc < std::min(fr, vals[worst])) {
        pts[worst] = trial2;
        vals[worst] = fc;
      } else {
        for (std::size_t i = 0; i <= n; ++i) {
          if (i == best) continue;
          for (std::size_t k = 0; k < n; ++k) {
            pts[i][k] = pts[best][k] + 0.5 * (pts[i][k] - pts[best][k]);
          }
          vals[i] = eval(pts[i]);
        }
      }
    }
  }
  const auto best =
      std::min_element(vals.begin(), vals.end()) - vals.begin();
  res.x = pts[static_cast<std::size_t>(best)];
  res.value = vals[static_cast<std::size_t>(best)];
  res.iterations = it;
  return res;
}

}  // namespace ssalt::opt
