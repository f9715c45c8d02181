#include "ssalt/likelihood.hpp"

#include <algorithm>
#include <cmath>

#include "ssalt/errors.hpp"

namespace ssalt {

namespace {

// log(1e-300): psi is floored here before entering a log term so that
// extreme parameter proposals cannot produce -inf.
constexpr double kLogPsiFloor = -690.7755278982137;

}  // namespace

double risk_log_lik(const RiskParams& rp, std::size_t risk,
                    const Dataset& data, std::array<double, 3>* grad) {
  const DesignSpec& design = data.design();
  const double x1 = design.x1();
  const double x2 = 1.0;
  const double eta1 = rp.a + rp.b * x1;
  const double eta2 = rp.a + rp.b * x2;
  const double tau = design.tau();
  const double beta = rp.beta;
  const double log_beta = std::log(beta);
  const int label = static_cast<int>(risk) + 1;

  double value = 0.0;
  double ga = 0.0;
  double gb = 0.0;
  double gbeta = 0.0;

  for (const auto& o : data.observations()) {
    if (o.cause < 0 || o.cause > 2) {
      throw DataError("log_lik: cause must be 0, 1 or 2");
    }
    if (!(o.time > 0.0)) throw DataError("log_lik: time must be positive");

    const auto [log_psi, share1] = detail::log_exposure(eta1, eta2, tau, o.time);
    // d log psi / d b; d log psi / d a is always -1.
    const double dlpsi_db = -(share1 * x1 + (1.0 - share1) * x2);
    const double hazard = std::exp(beta * log_psi);

    value -= hazard;
    if (grad) {
      ga += beta * hazard;
      gb -= beta * hazard * dlpsi_db;
      gbeta -= hazard * log_psi;
    }

    if (o.cause == label) {
      const int phase = design.phase_at(o.time);
      const double x = phase == 1 ? x1 : x2;
      const double eta = phase == 1 ? eta1 : eta2;
      const bool floored = log_psi < kLogPsiFloor;
      const double lp = floored ? kLogPsiFloor : log_psi;
      value += log_beta - eta + (beta - 1.0) * lp;
      if (grad) {
        ga += -1.0 - (floored ? 0.0 : (beta - 1.0));
        gb += -x + (floored ? 0.0 : (beta - 1.0) * dlpsi_db);
        gbeta += 1.0 / beta + lp;
      }
    }
  }
  if (grad) *grad = {ga, gb, gbeta};
  return value;
}

LogLikValue log_lik(const ModelParams& params, const Dataset& data,
                    bool with_gradient) {
  LogLikValue out;
  std::array<double, 6> g{};
  for (std::size_t j = 0; j < kNumRisks; ++j) {
    std::array<double, 3> gj{};
    out.value +=
        risk_log_lik(params.risk[j], j, data, with_gradient ? &gj : nullptr);
    std::copy(gj.begin(), gj.end(), g.begin() + 3 * j);
  }
  if (with_gradient) out.gradient = g;
  return out;
}

std::array<double, 6> log_lik_grad_fd(const ModelParams& params,
                                      const Dataset& data, double h) {
  if (!(h > 0.0)) throw DomainError("log_lik_grad_fd: step must be positive");
  const auto base = params.to_array();
  std::array<double, 6> g{};
  for (std::size_t i = 0; i < 6; ++i) {
    const double step = h * (1.0 + std::abs(base[i]));
    auto up = base;
    auto down = base;
    up[i] += step;
    down[i] -= step;
    const double fu = log_lik(ModelParams::from_array(up), data, false).value;
    const double fd = log_lik(ModelParams::from_array(down), data, false).value;
    g[i] = (fu - fd) / (up[i] - down[i]);
  }
  return g;
}

std::array<double, 6> natural_to_phi_gradient(
    const std::array<double, 6>& g, const PhiParams& phi) {
  const double c = log_neg_log1m(phi.q);
  std::array<double, 6> out{};
  for (std::size_t j = 0; j < kNumRisks; ++j) {
    const auto& r = phi.risk[j];
    const double da = g[3 * j];
    const double db = g[3 * j + 1];
    const double dbeta = g[3 * j + 2];
    out[3 * j] = da / r.quantile;
    out[3 * j + 1] = -db;
    out[3 * j + 2] = dbeta + da * c / (r.shape * r.shape);
  }
  return out;
}

}  // namespace ssalt
