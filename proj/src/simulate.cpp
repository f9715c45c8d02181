#include "ssalt/simulate.hpp"

#include <algorithm>
#include <cmath>

#include "ssalt/errors.hpp"

namespace ssalt {

double sample_cause_lifetime(const ModelParams& params, std::size_t risk,
                             const DesignSpec& design, double u) {
  if (!(u > 0.0 && u < 1.0)) {
    throw DomainError("sample_cause_lifetime: u must lie in (0, 1)");
  }
  const auto& r = params.risk[risk];
  const double theta1 = std::exp(r.a + r.b * design.x1());
  const double theta2 = std::exp(r.a + r.b);
  const double tau = design.tau();
  // Exposure needed to fail: psi with psi^beta = -log(1-u).
  const double w = std::pow(-std::log1p(-u), 1.0 / r.beta);
  const double before = theta1 * w;
  if (before < tau) return before;
  return tau + theta2 * (w - tau / theta1);
}

namespace {

Dataset simulate_impl(const ModelParams& params, const DesignSpec& design,
                      RngSeed seed,
                      std::vector<std::array<double, 2>>* latent) {
  CounterRng rng(seed);
  const int n = design.n();
  std::vector<Observation> obs;
  obs.reserve(static_cast<std::size_t>(n));
  if (latent) latent->assign(static_cast<std::size_t>(n), {0.0, 0.0});
  for (int i = 0; i < n; ++i) {
    const double t1 = sample_cause_lifetime(params, 0, design, rng.uniform());
    const double t2 = sample_cause_lifetime(params, 1, design, rng.uniform());
    if (latent) (*latent)[static_cast<std::size_t>(i)] = {t1, t2};
    const double t = std::min(t1, t2);
    if (t > design.tc()) {
      obs.push_back({design.tc(), 0});
    } else {
      obs.push_back({t, t1 <= t2 ? 1 : 2});
    }
  }
  return Dataset(design, std::move(obs));
}

}  // namespace

Dataset simulate_dataset(const ModelParams& params, const DesignSpec& design,
                         RngSeed seed) {
  return simulate_impl(params, design, seed, nullptr);
}

Dataset simulate_dataset(const ModelParams& params, const DesignSpec& design,
                         RngSeed seed,
                         std::vector<std::array<double, 2>>& latent) {
  return simulate_impl(params, design, seed, &latent);
}

}  // namespace ssalt
