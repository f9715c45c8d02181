#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "ssalt/diagnostics.hpp"

using namespace ssalt;

namespace {

ChainMatrix ar1(int n, int chains, double rho, unsigned seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> z(0.0, 1.0);
  ChainMatrix m(n, chains);
  for (int c = 0; c < chains; ++c) {
    double x = z(gen) / std::sqrt(1.0 - rho * rho);
    for (int i = 0; i < n; ++i) {
      x = rho * x + z(gen);
      m(i, c) = x;
    }
  }
  return m;
}

// Gelman-Rubin on halves, written out from the definition.
double classic_split_rhat(const ChainMatrix& x) {
  const int half = static_cast<int>(x.rows()) / 2;
  std::vector<std::vector<double>> parts;
  for (int c = 0; c < x.cols(); ++c) {
    std::vector<double> a, b;
    for (int i = 0; i < half; ++i) a.push_back(x(i, c));
    for (int i = 0; i < half; ++i) b.push_back(x(x.rows() - half + i, c));
    parts.push_back(a);
    parts.push_back(b);
  }
  const double n = half, m = static_cast<double>(parts.size());
  std::vector<double> means, vars;
  for (const auto& p : parts) {
    double s = 0.0;
    for (double v : p) s += v;
    const double mu = s / n;
    double ss = 0.0;
    for (double v : p) ss += (v - mu) * (v - mu);
    means.push_back(mu);
    vars.push_back(ss / (n - 1));
  }
  double grand = 0.0, w = 0.0;
  for (std::size_t i = 0; i < means.size(); ++i) {
    grand += means[i] / m;
    w += vars[i] / m;
  }
  double bn = 0.0;
  for (double mu : means) bn += (mu - grand) * (mu - grand) / (m - 1);
  return std::sqrt(((n - 1) / n * w + bn) / w);
}

}  // namespace

TEST(Autocovariance, MatchesDirectSum) {
  std::mt19937_64 gen(1);
  std::normal_distribution<double> z;
  Eigen::VectorXd x(257);
  for (auto& v : x) v = z(gen) + 3.0;
  const auto fft = autocovariance(x);
  const double mean = x.mean();
  ASSERT_EQ(fft.size(), 257u);
  for (int lag = 0; lag < 257; ++lag) {
    double s = 0.0;
    for (int i = 0; i + lag < 257; ++i) s += (x[i] - mean) * (x[i + lag] - mean);
    EXPECT_NEAR(fft[static_cast<std::size_t>(lag)], s / 257.0, 1e-10);
  }
  const auto acf = autocorrelation(x, 5);
  ASSERT_EQ(acf.size(), 5u);
  EXPECT_NEAR(acf[0], fft[1] / fft[0], 1e-12);
}

TEST(SplitRhat, MatchesDefinition) {
  const auto x = ar1(101, 3, 0.5, 2);
  EXPECT_NEAR(split_rhat(x), classic_split_rhat(x), 1e-12);
}

TEST(Diagnostics, IidNormalChains) {
  const auto x = ar1(1000, 4, 0.0, 3);
  const auto d = diagnose_quantity(x);
  EXPECT_FALSE(d.degenerate);
  EXPECT_LT(d.rhat, 1.01);
  EXPECT_NEAR(d.ess_bulk, 4000.0, 400.0);
  EXPECT_NEAR(d.ess_tail, 4000.0, 800.0);
  EXPECT_NEAR(ess_basic(x), 4000.0, 400.0);
}

TEST(Diagnostics, Ar1EffectiveSampleSize) {
  // For AR(1) the integrated autocorrelation time is (1 + rho) / (1 - rho).
  for (double rho : {0.5, 0.9}) {
    const auto x = ar1(20000, 4, rho, 4);
    const double expected = 80000.0 * (1 - rho) / (1 + rho);
    EXPECT_NEAR(ess_basic(x), expected, 0.12 * expected) << rho;
    EXPECT_NEAR(diagnose_quantity(x).ess_bulk, expected, 0.15 * expected) << rho;
  }
}

TEST(Diagnostics, DetectsShiftedChain) {
  auto x = ar1(1000, 4, 0.3, 5);
  x.col(2).array() += 1.0;
  EXPECT_GT(diagnose_quantity(x).rhat, 1.05);
}

TEST(Diagnostics, DetectsScaleDifferenceThroughFolding) {
  // Same location, different spread: bulk R-hat misses it, folded does not.
  auto x = ar1(2000, 4, 0.0, 6);
  x.col(0) *= 3.0;
  EXPECT_GT(diagnose_quantity(x).rhat, 1.05);
}

TEST(Diagnostics, DetectsDriftWithinChain) {
  auto x = ar1(1000, 4, 0.0, 7);
  for (int i = 0; i < 1000; ++i) x(i, 1) += 2.0 * i / 1000.0;
  EXPECT_GT(diagnose_quantity(x).rhat, 1.05);
}

TEST(Diagnostics, ConstantChainIsDegenerate) {
  auto x = ar1(100, 3, 0.0, 8);
  x.col(1).setConstant(2.0);
  const auto d = diagnose_quantity(x);
  EXPECT_TRUE(d.degenerate);
  EXPECT_TRUE(std::isnan(d.rhat));
  EXPECT_TRUE(std::isnan(d.ess_bulk));
}

TEST(Diagnostics, InvariantUnderMonotoneTransform) {
  const auto x = ar1(500, 3, 0.6, 9);
  const ChainMatrix y = x.array().exp().matrix();
  const auto a = diagnose_quantity(x), b = diagnose_quantity(y);
  EXPECT_NEAR(a.ess_bulk, b.ess_bulk, 1e-9 * a.ess_bulk);
  EXPECT_NEAR(a.ess_tail, b.ess_tail, 1e-9 * a.ess_tail);
}

TEST(NormalQuantile, InvertsNormalCdf) {
  EXPECT_NEAR(normal_quantile(0.975), 1.959963984540054, 1e-14);
  EXPECT_DOUBLE_EQ(normal_quantile(0.5), 0.0);
  for (double p : {1e-10, 1e-4, 0.01, 0.2, 0.6, 0.99, 1 - 1e-9}) {
    const double z = normal_quantile(p);
    EXPECT_NEAR(0.5 * std::erfc(-z / std::sqrt(2.0)), p, 1e-13 * std::max(p, 1e-3));
  }
}
