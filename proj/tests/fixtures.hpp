#pragma once

// Shared test inputs: the bundled dataset and the reference values it is
// checked against.

#include <array>
#include <string>

#include "ssalt/io.hpp"
#include "ssalt/prior.hpp"

namespace ssalt::fixtures {

inline std::string data_dir() { return SSALT_DATA_DIR; }
inline std::string config_dir() { return SSALT_CONFIG_DIR; }

// Geometry under which the bundled dataset reproduces the reference fit.
inline DesignSpec fixture_design() {
  return {StressFrame::from_kelvin(293.0, 293.0, 353.0), 5.0, 6.0, 35};
}

inline Dataset fixture_data(const DesignSpec& design = fixture_design()) {
  return io::read_dataset_csv(data_dir() + "/solar_lighting.csv", design);
}

// (a1, b1, beta1, a2, b2, beta2)
inline constexpr std::array<double, 6> kReferenceMle = {
    4.5064, -4.7131, 0.7692, 2.0410, -1.2277, 1.5321};

// Bootstrap means and standard errors of phi, in PhiParams::to_array order.
inline constexpr std::array<double, 6> kBootMean = {0.1634, 4.2805, 1.2006,
                                                    0.1527, 1.4025, 1.6989};
inline constexpr std::array<double, 6> kBootSe = {0.3705, 1.2737, 1.2724,
                                                  0.1550, 0.5039, 0.4604};

// Reference gamma hyperparameters (alpha, lambda) for Priors I, II, III.
inline constexpr std::array<std::array<std::array<double, 2>, 6>, 3>
    kReferencePriors = {{
        {{{0.195, 1.192}, {11.290, 2.637}, {0.889, 0.741},
          {0.970, 6.354}, {7.748, 5.526}, {13.606, 8.012}}},
        {{{0.086, 0.530}, {5.018, 1.172}, {0.395, 0.329},
          {0.431, 2.824}, {3.444, 2.456}, {6.047, 3.561}}},
        {{{0.086, 0.530}, {10.501, 1.696}, {0.395, 0.329},
          {0.431, 2.824}, {8.153, 3.778}, {6.047, 3.561}}},
    }};

inline GammaPrior reference_prior(int flavour_index, double q = 0.01) {
  GammaPrior p;
  p.q = q;
  p.flavour = static_cast<PriorFlavour>(flavour_index);
  for (std::size_t k = 0; k < 6; ++k) {
    p.component[k] = {kReferencePriors[static_cast<std::size_t>(flavour_index)][k][0],
                      kReferencePriors[static_cast<std::size_t>(flavour_index)][k][1]};
  }
  return p;
}

inline BootstrapSummary reference_bootstrap(double q = 0.01) {
  BootstrapSummary s;
  s.mean = kBootMean;
  s.se = kBootSe;
  s.q = q;
  s.n_valid = 1000;
  return s;
}

// Fixture MLE to full precision (computed by fit_mle, checked against
// kReferenceMle in the tests).
inline ModelParams fixture_mle() {
  return fit_mle(fixture_data()).params;
}

}  // namespace ssalt::fixtures
