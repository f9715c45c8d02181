#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "ssalt/errors.hpp"
#include "ssalt/model.hpp"

using namespace ssalt;

namespace {

const StressFrame kFrame = StressFrame::from_kelvin(293.0, 320.2136, 353.0);

ModelParams mle() {
  return ModelParams::from_array(fixtures::kReferenceMle);
}

ModelParams random_params(std::mt19937_64& gen) {
  std::uniform_real_distribution<double> a(-0.5, 3.0), b(-4.0, -0.2),
      beta(0.4, 3.0);
  ModelParams p;
  for (auto& r : p.risk) r = {a(gen), b(gen), beta(gen)};
  return p;
}

}  // namespace

TEST(Stress, StandardiseEndpointsAndMidpoint) {
  EXPECT_DOUBLE_EQ(standardise_stress(kFrame.s0(), kFrame), 0.0);
  EXPECT_DOUBLE_EQ(standardise_stress(kFrame.s2(), kFrame), 1.0);
  EXPECT_NEAR(standardise_stress(1.0 / 320.2136, kFrame), 0.5, 1e-3);
}

TEST(Stress, StandardiseIsAffine) {
  const double s = 1.0 / 300.0, t = 1.0 / 340.0;
  for (double lam : {0.0, 0.25, 0.5, 0.9, 1.0}) {
    EXPECT_NEAR(standardise_stress(lam * s + (1 - lam) * t, kFrame),
                lam * standardise_stress(s, kFrame) +
                    (1 - lam) * standardise_stress(t, kFrame),
                1e-12);
  }
}

TEST(Stress, NonFiniteStressRejected) {
  EXPECT_THROW(standardise_stress(NAN, kFrame), DomainError);
}

TEST(Stress, FrameOrderingEnforced) {
  EXPECT_THROW(StressFrame(1.0, 2.0, 0.5), DomainError);
  EXPECT_THROW(StressFrame(1.0, 0.5, 0.5), DomainError);
  EXPECT_NO_THROW(StressFrame(1.0, 1.0, 0.5));
}

TEST(Stress, LowerStressGridInKelvin) {
  const double kelvin[] = {298.0663, 303.3109, 308.7433, 314.3739, 320.2136,
                              326.2744, 332.5691, 339.1115, 345.9164};
  for (int i = 0; i < 9; ++i) {
    const auto f = kFrame.with_x1(0.1 * (i + 1));
    EXPECT_NEAR(1.0 / f.s1(), kelvin[i], 1e-3);
  }
}

TEST(Design, Invariants) {
  EXPECT_THROW(DesignSpec(kFrame, 6.0, 6.0, 10), DomainError);
  EXPECT_THROW(DesignSpec(kFrame, 0.0, 6.0, 10), DomainError);
  EXPECT_THROW(DesignSpec(kFrame, 3.0, 6.0, 0), DomainError);
  const DesignSpec d(kFrame, 3.0, 6.0, 10);
  EXPECT_EQ(d.phase_at(2.999), 1);
  EXPECT_EQ(d.phase_at(3.0), 2);
}

TEST(Theta, Values) {
  ModelParams p;
  p.risk[0] = {0.0, -1.0, 1.0};
  EXPECT_DOUBLE_EQ(theta(p, 0, 0.0), 1.0);
  EXPECT_DOUBLE_EQ(theta(p, 0, 1.0), std::exp(-1.0));
  EXPECT_NEAR(theta(mle(), 0, 0.0), std::exp(4.5064), 1e-9);
}

TEST(Cem, PhaseOneIdentityAndEqualScales) {
  const DesignSpec d(kFrame, 2.0, 6.0, 10);
  EXPECT_DOUBLE_EQ(cem_transformed_time(mle(), 1, d, 1.0), 1.0);
  ModelParams flat;
  flat.risk[1] = {1.0, -1e-300, 1.3};
  EXPECT_NEAR(cem_transformed_time(flat, 1, d, 4.5), 4.5, 1e-12);
  EXPECT_THROW(cem_transformed_time(mle(), 0, d, -1.0), DomainError);
}

TEST(Cem, AgreesWithExposureTimesScale) {
  const DesignSpec d(kFrame, 0.8333, 6.0, 10);
  const auto p = mle();
  for (double t : {1.0, 2.5, 5.9}) {
    const double via_exposure = cumulative_exposure(p, 1, d, t) * theta(p, 1, 1.0);
    EXPECT_NEAR(cem_transformed_time(p, 1, d, t), via_exposure, 1e-12);
  }
}

TEST(SubCdf, ExponentialSpecialCase) {
  ModelParams p;
  p.risk[0] = {std::log(2.0), -1e-300, 1.0};
  const DesignSpec d(kFrame, 2.0, 6.0, 10);
  EXPECT_EQ(sub_cdf(p, 0, d, 0.0), 0.0);
  for (double t : {0.5, 2.0, 4.0}) {
    EXPECT_NEAR(sub_cdf(p, 0, d, t), 1.0 - std::exp(-t / 2.0), 1e-12);
  }
}

TEST(SubCdf, MatchesIntegratedDensity) {
  const DesignSpec d(kFrame, 2.5, 6.0, 10);
  const auto p = mle();
  for (std::size_t j = 0; j < 2; ++j) {
    // Trapezoid rule on each phase separately (the density jumps at tau).
    // t = a + s^4 (b - a) removes the t^{beta-1} singularity at the left end.
    auto integrate = [&](double a, double b) {
      const int n = 20000;
      double sum = 0.0;
      for (int i = 0; i <= n; ++i) {
        const double s = static_cast<double>(i) / n;
        const double t = std::min(a + s * s * s * s * (b - a),
                                  std::nextafter(b, 0.0));
        const double w = (i == 0 || i == n) ? 0.5 : 1.0;
        sum += w * sub_density(p, j, d, t) * 4.0 * s * s * s * (b - a);
      }
      return sum / n;
    };
    const double first = integrate(0.0, d.tau());
    EXPECT_NEAR(first, sub_cdf(p, j, d, d.tau()), 2e-5);
    EXPECT_NEAR(first + integrate(d.tau(), 5.0), sub_cdf(p, j, d, 5.0), 2e-5);
  }
}

TEST(OverallCdf, SingleRiskCollapse) {
  ModelParams p = mle();
  p.risk[1].a = 700.0;  // theta2 effectively infinite
  const DesignSpec d(kFrame, 2.0, 6.0, 10);
  for (double t : {0.5, 2.0, 5.0}) {
    EXPECT_NEAR(overall_cdf(p, d, t), sub_cdf(p, 0, d, t), 1e-9);
  }
  EXPECT_EQ(overall_cdf(p, d, 0.0), 0.0);
}

TEST(OverallCdf, MonotoneAndContinuousAtTau) {
  std::mt19937_64 gen(11);
  for (int rep = 0; rep < 20; ++rep) {
    const auto p = random_params(gen);
    const DesignSpec d(kFrame, 1.7, 6.0, 10);
    double prev = 0.0;
    for (int i = 0; i < 1000; ++i) {
      const double f = overall_cdf(p, d, 18.0 * i / 999.0);
      ASSERT_GE(f, prev);
      prev = f;
    }
    EXPECT_LT(std::abs(overall_cdf(p, d, d.tau() - 1e-8) -
                       overall_cdf(p, d, d.tau() + 1e-8)),
              1e-6);
  }
}

TEST(Quantile, Trivial) {
  ModelParams p;
  p.risk[0] = {0.0, -1.0, 1.0};
  p.risk[1] = {0.0, -1.0, 1.0};
  EXPECT_NEAR(use_quantile(p, 1.0 - std::exp(-2.0)), 1.0, 1e-12);
  EXPECT_THROW(use_quantile(p, 0.0), DomainError);
  EXPECT_THROW(use_quantile(p, 1.0), DomainError);
}

TEST(Quantile, ReferenceFitAgainstBisection) {
  const auto p = mle();
  const double t = use_quantile(p, 0.10);
  EXPECT_NEAR(t, oracle::bisection_quantile(p, 0.10), 1e-10);
  double residual = 0.0;
  for (const auto& r : p.risk) residual += std::pow(t * std::exp(-r.a), r.beta);
  EXPECT_LT(std::abs(residual + std::log1p(-0.10)), 1e-10);
}

TEST(Quantile, MonotoneAndVanishingAtZero) {
  const auto p = mle();
  double prev = 0.0;
  for (double q = 0.01; q < 1.0; q += 0.01) {
    const double t = use_quantile(p, q);
    ASSERT_GT(t, prev);
    prev = t;
  }
  EXPECT_LT(use_quantile(p, 1e-12), 1e-6 * use_quantile(p, 0.5));
}

TEST(Quantile, RoundTripAtConstantStress) {
  // Both phases at the same stress: the use-stress CDF is the plain
  // competing-risks CDF, so F(t_p) = p.
  ModelParams p = mle();
  const DesignSpec d(StressFrame::from_kelvin(293.0, 293.0, 353.0), 5.9, 6.0, 10);
  for (double q : {0.01, 0.1, 0.5, 0.9}) {
    const double t = use_quantile(p, q);
    if (t < d.tau()) EXPECT_NEAR(overall_cdf(p, d, t), q, 1e-8);
  }
}
