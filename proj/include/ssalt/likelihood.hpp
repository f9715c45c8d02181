#pragma once

#include <array>
#include <cstddef>
#include <optional>

#include "ssalt/model.hpp"
#include "ssalt/phi.hpp"

namespace ssalt {

// Log-likelihood of an SSALT competing-risks sample under Type-I censoring,
// additive constant dropped. Gradient ordered (a1, b1, beta1, a2, b2, beta2).
struct LogLikValue {
  double value = 0.0;
  std::optional<std::array<double, 6>> gradient;
};

LogLikValue log_lik(const ModelParams& params, const Dataset& data,
                    bool with_gradient = true);

// Contribution of one risk. The full log-likelihood is the sum over risks,
// which is what makes the two parameter blocks separable. grad receives
// d/d(a, b, beta) when non-null.
double risk_log_lik(const RiskParams& risk_params, std::size_t risk,
                    const Dataset& data, std::array<double, 3>* grad);

// Central finite differences with per-coordinate step h * (1 + |param|).
// Validation oracle only.
std::array<double, 6> log_lik_grad_fd(const ModelParams& params,
                                      const Dataset& data, double h);

// Chain rule from the natural gradient to the phi gradient, both in their
// respective flattened orders.
std::array<double, 6> natural_to_phi_gradient(
    const std::array<double, 6>& natural_grad, const PhiParams& phi);

}  // namespace ssalt
