#include "ssalt/phi.hpp"

#include <cmath>

#include "ssalt/errors.hpp"

namespace ssalt {

double log_neg_log1m(double q) {
  if (!(q > 0.0 && q < 1.0)) throw DomainError("phi: q must lie in (0, 1)");
  return std::log(-std::log1p(-q));
}

bool PhiParams::valid() const {
  for (const auto& r : risk) {
    if (!(r.quantile > 0.0 && r.slope > 0.0 && r.shape > 0.0)) return false;
    if (!std::isfinite(r.quantile) || !std::isfinite(r.slope) ||
        !std::isfinite(r.shape)) {
      return false;
    }
  }
  return q > 0.0 && q < 1.0;
}

std::array<double, 6> PhiParams::to_array() const {
  return {risk[0].quantile, risk[0].slope, risk[0].shape,
          risk[1].quantile, risk[1].slope, risk[1].shape};
}

PhiParams PhiParams::from_array(std::span<const double, 6> v, double q) {
  PhiParams phi;
  phi.risk[0] = {v[0], v[1], v[2]};
  phi.risk[1] = {v[3], v[4], v[5]};
  phi.q = q;
  return phi;
}

PhiParams to_phi(const ModelParams& params, double q) {
  const double c = log_neg_log1m(q);
  PhiParams phi;
  phi.q = q;
  for (std::size_t j = 0; j < kNumRisks; ++j) {
    const auto& r = params.risk[j];
    phi.risk[j] = {std::exp(r.a + c / r.beta), -r.b, r.beta};
  }
  return phi;
}

ModelParams from_phi(const PhiParams& phi) {
  const double c = log_neg_log1m(phi.q);
  ModelParams params;
  for (std::size_t j = 0; j < kNumRisks; ++j) {
    const auto& r = phi.risk[j];
    params.risk[j] = {std::log(r.quantile) - c / r.shape, -r.slope, r.shape};
  }
  return params;
}

}  // namespace ssalt
