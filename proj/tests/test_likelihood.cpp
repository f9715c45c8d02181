#include <gtest/gtest.h>

#include <cmath>
#include <algorithm>
#include <random>

#include "fixtures.hpp"
#include "ssalt/errors.hpp"
#include "ssalt/likelihood.hpp"

using namespace ssalt;

namespace {

// Log-likelihood assembled term by term from the Weibull density and
// survivor function of each risk at its cumulative exposure.
double oracle_loglik(const ModelParams& p, const Dataset& data) {
  const auto& d = data.design();
  double ll = 0.0;
  for (const auto& o : data.observations()) {
    const double x = d.x(d.phase_at(o.time));
    for (std::size_t j = 0; j < kNumRisks; ++j) {
      const double beta = p.risk[j].beta;
      const double psi = cumulative_exposure(p, j, d, o.time);
      ll -= std::pow(psi, beta);  // log survivor
      if (o.cause == static_cast<int>(j) + 1) {
        ll += std::log(beta) - std::log(theta(p, j, x)) +
              (beta - 1.0) * std::log(psi);
      }
    }
  }
  return ll;
}

ModelParams perturbed(std::mt19937_64& gen, const ModelParams& base,
                      double scale) {
  std::normal_distribution<double> z(0.0, scale);
  auto v = base.to_array();
  for (auto& x : v) x += z(gen) * (0.1 + std::abs(x));
  ModelParams p = ModelParams::from_array(v);
  for (auto& r : p.risk) {
    r.b = -std::abs(r.b);
    r.beta = std::abs(r.beta) + 0.05;
  }
  return p;
}

Dataset fixture_at_midstress() {
  // Same observations under a design with a genuine first-phase stress so
  // both b derivatives are informative.
  const DesignSpec d(StressFrame::from_kelvin(293.0, 320.2136, 353.0), 5.0,
                     6.0, 35);
  return fixtures::fixture_data(d);
}

}  // namespace

TEST(LogLik, MatchesDensityOracleUpToConstant) {
  const auto data = fixture_at_midstress();
  const auto base = ModelParams::from_array(fixtures::kReferenceMle);
  const double offset = log_lik(base, data, false).value - oracle_loglik(base, data);
  std::mt19937_64 gen(3);
  for (int rep = 0; rep < 50; ++rep) {
    const auto p = perturbed(gen, base, 0.15);
    EXPECT_NEAR(log_lik(p, data, false).value - oracle_loglik(p, data), offset,
                1e-8 * (1.0 + std::abs(offset)));
  }
}

TEST(LogLik, GradientMatchesCentralDifferences) {
  const auto data = fixture_at_midstress();
  const auto base = ModelParams::from_array(fixtures::kReferenceMle);
  std::mt19937_64 gen(5);
  for (int rep = 0; rep < 50; ++rep) {
    const auto p = perturbed(gen, base, 0.15);
    const auto g = *log_lik(p, data).gradient;
    auto v = p.to_array();
    for (std::size_t i = 0; i < 6; ++i) {
      const double h = 1e-6 * (1.0 + std::abs(v[i]));
      auto up = v, down = v;
      up[i] += h;
      down[i] -= h;
      const double fd = (oracle_loglik(ModelParams::from_array(up), data) -
                         oracle_loglik(ModelParams::from_array(down), data)) /
                        (2 * h);
      EXPECT_NEAR(g[i], fd, 1e-5 * std::max(1.0, std::abs(fd)))
          << "component " << i << " rep " << rep;
    }
  }
}

TEST(LogLik, LibraryFiniteDifferenceHelperAgrees) {
  const auto data = fixture_at_midstress();
  const auto p = ModelParams::from_array(fixtures::kReferenceMle);
  const auto g = *log_lik(p, data).gradient;
  const auto fd = log_lik_grad_fd(p, data, 1e-6);
  for (std::size_t i = 0; i < 6; ++i) {
    EXPECT_NEAR(g[i], fd[i], 1e-5 * std::max(1.0, std::abs(fd[i])));
  }
}

TEST(LogLik, SeparatesIntoRiskBlocks) {
  const auto data = fixture_at_midstress();
  const auto p = ModelParams::from_array(fixtures::kReferenceMle);
  std::array<double, 3> g1{}, g2{};
  const double l1 = risk_log_lik(p.risk[0], 0, data, &g1);
  const double l2 = risk_log_lik(p.risk[1], 1, data, &g2);
  const auto full = log_lik(p, data);
  EXPECT_NEAR(l1 + l2, full.value, 1e-10);
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_NEAR((*full.gradient)[i], g1[i], 1e-10);
    EXPECT_NEAR((*full.gradient)[3 + i], g2[i], 1e-10);
  }
  // Changing risk 2 leaves the risk 1 block untouched.
  ModelParams q = p;
  q.risk[1].a += 0.5;
  EXPECT_DOUBLE_EQ(risk_log_lik(q.risk[0], 0, data, nullptr), l1);
}

TEST(LogLik, PhiGradientMatchesDifferencesInPhi) {
  const auto data = fixture_at_midstress();
  const auto p = ModelParams::from_array(fixtures::kReferenceMle);
  for (double q : {0.001, 0.01, 0.1}) {
    const PhiParams phi = to_phi(p, q);
    const auto g = natural_to_phi_gradient(*log_lik(p, data).gradient, phi);
    const auto v = phi.to_array();
    for (std::size_t i = 0; i < 6; ++i) {
      const double h = 1e-6 * v[i];
      auto up = v, down = v;
      up[i] += h;
      down[i] -= h;
      const double fd =
          (log_lik(from_phi(PhiParams::from_array(up, q)), data, false).value -
           log_lik(from_phi(PhiParams::from_array(down, q)), data, false).value) /
          (2 * h);
      EXPECT_NEAR(g[i], fd, 1e-5 * std::max(1.0, std::abs(fd)));
    }
  }
}

TEST(Phi, RoundTripAndDefinition) {
  const auto p = ModelParams::from_array(fixtures::kReferenceMle);
  const double q = 0.01;
  const PhiParams phi = to_phi(p, q);
  for (std::size_t j = 0; j < 2; ++j) {
    const auto& r = p.risk[j];
    EXPECT_NEAR(phi.risk[j].quantile,
                std::exp(r.a) * std::pow(-std::log1p(-q), 1.0 / r.beta), 1e-12);
    EXPECT_DOUBLE_EQ(phi.risk[j].slope, -r.b);
    EXPECT_DOUBLE_EQ(phi.risk[j].shape, r.beta);
  }
  const auto back = from_phi(phi).to_array();
  for (std::size_t i = 0; i < 6; ++i) {
    EXPECT_NEAR(back[i], fixtures::kReferenceMle[i], 1e-12);
  }
  EXPECT_THROW(to_phi(p, 0.0), DomainError);
  EXPECT_THROW(to_phi(p, 1.0), DomainError);
}

TEST(Phi, QuantileIsSingleRiskQuantileAtUseStress) {
  // phi1 solves P(T_j <= t) = q for risk j alone at x = 0.
  const auto p = ModelParams::from_array(fixtures::kReferenceMle);
  const PhiParams phi = to_phi(p, 0.05);
  for (std::size_t j = 0; j < 2; ++j) {
    const double t = phi.risk[j].quantile;
    const double cdf =
        -std::expm1(-std::pow(t / std::exp(p.risk[j].a), p.risk[j].beta));
    EXPECT_NEAR(cdf, 0.05, 1e-12);
  }
}

TEST(LogLik, NoConstantIsDropped) {
  const auto data = fixture_at_midstress();
  const auto p = ModelParams::from_array(fixtures::kReferenceMle);
  EXPECT_NEAR(log_lik(p, data, false).value, oracle_loglik(p, data), 1e-9);
}

TEST(LogLik, FirstOrderConditionAtReferenceFit) {
  const auto data = fixtures::fixture_data();
  const auto g = *log_lik(fixtures::fixture_mle(), data).gradient;
  for (double gi : g) EXPECT_LT(std::abs(gi), 1e-3);
}

TEST(LogLik, AllCensored) {
  const auto design = fixtures::fixture_design().with_n(4);
  const Dataset data(design, std::vector<Observation>(4, {design.tc(), 0}));
  const auto p = ModelParams::from_array(fixtures::kReferenceMle);
  double expected = 0.0;
  for (std::size_t j = 0; j < 2; ++j) {
    expected -= 4.0 * std::pow(cumulative_exposure(p, j, design, design.tc()),
                               p.risk[j].beta);
  }
  EXPECT_NEAR(log_lik(p, data, false).value, expected, 1e-10);
  // d/da_j of -n psi^beta is n beta psi^beta since d psi/da = -psi.
  const auto g = *log_lik(p, data).gradient;
  for (std::size_t j = 0; j < 2; ++j) {
    const double closed = 4.0 * p.risk[j].beta *
        std::pow(cumulative_exposure(p, j, design, design.tc()), p.risk[j].beta);
    EXPECT_GT(g[3 * j], 0.0);
    EXPECT_NEAR(g[3 * j], closed, 1e-9 * closed);
  }
}

TEST(LogLik, PermutationAndCensoredIncrement) {
  const auto data = fixture_at_midstress();
  const auto p = ModelParams::from_array(fixtures::kReferenceMle);
  auto obs = std::vector<Observation>(data.observations().begin(),
                                      data.observations().end());
  std::mt19937_64 gen(9);
  std::shuffle(obs.begin(), obs.end(), gen);
  const Dataset shuffled(data.design(), obs);
  EXPECT_NEAR(log_lik(p, shuffled, false).value, log_lik(p, data, false).value,
              1e-10);

  obs.push_back({data.design().tc(), 0});
  const Dataset extra(data.design().with_n(data.design().n() + 1), obs);
  double increment = 0.0;
  for (std::size_t j = 0; j < 2; ++j) {
    increment -= std::pow(
        cumulative_exposure(p, j, data.design(), data.design().tc()),
        p.risk[j].beta);
  }
  EXPECT_NEAR(log_lik(p, extra, false).value - log_lik(p, data, false).value,
              increment, 1e-10);
}

TEST(LogLik, ShapeOneIsSmooth) {
  const auto data = fixture_at_midstress();
  auto p = ModelParams::from_array(fixtures::kReferenceMle);
  p.risk[0].beta = 1.0;
  p.risk[1].beta = 1.0;
  const auto g = *log_lik(p, data).gradient;
  const auto fd = log_lik_grad_fd(p, data, 1e-6);
  for (std::size_t i = 0; i < 6; ++i) {
    EXPECT_NEAR(g[i], fd[i], 1e-5 * std::max(1.0, std::abs(fd[i])));
  }
}
