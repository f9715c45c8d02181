#pragma once

// Quantile reparametrisation of the per-risk parameters:
//   phi1 = e^{a} (-log(1-q))^{1/beta}   (q-quantile of the risk at use stress)
//   phi2 = -b                           (acceleration slope magnitude)
//   phi3 = beta                         (Weibull shape)
// All six components are strictly positive.

#include <array>
#include <cstddef>
#include <span>

#include "ssalt/model.hpp"

namespace ssalt {

struct PhiRisk {
  double quantile = 1.0;  // phi1
  double slope = 1.0;     // phi2
  double shape = 1.0;     // phi3
};

struct PhiParams {
  std::array<PhiRisk, kNumRisks> risk{};
  double q = 0.01;

  bool valid() const;

  // Order (phi11, phi21, phi31, phi12, phi22, phi32), i.e. risk-major.
  std::array<double, 6> to_array() const;
  static PhiParams from_array(std::span<const double, 6> v, double q);
};

// Throws DomainError for q outside (0, 1).
PhiParams to_phi(const ModelParams& params, double q);
ModelParams from_phi(const PhiParams& phi);

// log(-log(1-q)), the offset that links phi1 and a.
double log_neg_log1m(double q);

}  // namespace ssalt
