#pragma once

#include <array>
#include <string>
#include <string_view>

#include "ssalt/mle.hpp"
#include "ssalt/phi.hpp"

namespace ssalt {

struct GammaComponent {
  double alpha = 1.0;   // shape
  double lambda = 1.0;  // rate
};

enum class PriorFlavour { I, II, III, Custom };

std::string_view flavour_name(PriorFlavour f);
// Accepts "I", "II", "III", "custom" (case-insensitive for the latter).
PriorFlavour parse_flavour(std::string_view s);

// Independent gamma laws on the six phi components, in PhiParams::to_array
// order (phi11, phi21, phi31, phi12, phi22, phi32).
struct GammaPrior {
  std::array<GammaComponent, 6> component{};
  double q = 0.01;
  PriorFlavour flavour = PriorFlavour::Custom;

  GammaComponent& at(std::size_t i, std::size_t risk) {
    return component[3 * risk + i];
  }
  const GammaComponent& at(std::size_t i, std::size_t risk) const {
    return component[3 * risk + i];
  }
  // Throws ConfigError unless every alpha, lambda > 0 and q in (0, 1).
  void validate() const;
};

GammaComponent mom_gamma(double mean, double se);

struct BootstrapSummary {
  std::array<double, 6> mean{};
  std::array<double, 6> se{};
  // Plug-in use-stress quantiles at quantile_p, summarised the same way.
  std::array<double, 3> quantile_p{0.01, 0.10, 0.50};
  std::array<double, 3> quantile_mean{};
  std::array<double, 3> quantile_se{};
  double q = 0.01;
  int n_valid = 0;
  int n_regenerated = 0;
};

BootstrapSummary elicit_bootstrap(const Dataset& data, const MleFit& fit,
                                  int n_reps, double q, RngSeed seed,
                                  Execution exec = {});

// I: moments (mu, se). II: (mu, 1.5 se). III: as II, with the slope
// components phi21 and phi22 moved to mean mu + 1.5 se.
GammaPrior build_prior(const BootstrapSummary& summary, PriorFlavour flavour);

double log_gamma_density(double x, const GammaComponent& g);

// -inf outside the support.
double log_prior_phi(const PhiParams& phi, const GammaPrior& prior);

// Induced density of the natural parameters: the phi density times
// |d phi / d(a, b, beta)| = prod_j phi1_j.
double log_prior_natural(const ModelParams& params, const GammaPrior& prior);

// Draws phi from the prior.
PhiParams sample_prior(const GammaPrior& prior, CounterRng& rng);

}  // namespace ssalt
