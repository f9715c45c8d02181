#include <gtest/gtest.h>

#include <chrono>
#include <cmath>
#include <set>

#include "fixtures.hpp"
#include "ssalt/errors.hpp"
#include "ssalt/likelihood.hpp"
#include "ssalt/mle.hpp"

using namespace ssalt;

TEST(Mle, ReproducesReferenceFit) {
  const auto data = fixtures::fixture_data();
  const auto t0 = std::chrono::steady_clock::now();
  const auto fit = fit_mle(data);
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  ASSERT_TRUE(fit.converged);
  const auto v = fit.params.to_array();
  for (std::size_t i = 0; i < 6; ++i) {
    EXPECT_NEAR(v[i], fixtures::kReferenceMle[i], 1e-3) << "component " << i;
  }
  EXPECT_LT(secs, 1.0);
}

TEST(Mle, IsALocalMaximum) {
  const auto data = fixtures::fixture_data();
  const auto fit = fit_mle(data);
  const auto g = *log_lik(fit.params, data).gradient;
  for (double gi : g) EXPECT_LT(std::abs(gi), 1e-4);
  const auto v = fit.params.to_array();
  for (std::size_t i = 0; i < 6; ++i) {
    for (double h : {-1e-3, 1e-3}) {
      auto w = v;
      w[i] += h;
      EXPECT_LT(log_lik(ModelParams::from_array(w), data, false).value,
                fit.loglik);
    }
  }
}

TEST(Mle, JointAndBlockwiseAgree) {
  const auto data = fixtures::fixture_data();
  const auto block = fit_mle(data);
  const auto joint = fit_mle(data, {}, {.joint = true});
  ASSERT_TRUE(joint.converged);
  const auto a = block.params.to_array(), b = joint.params.to_array();
  for (std::size_t i = 0; i < 6; ++i) EXPECT_NEAR(a[i], b[i], 1e-4);
}

TEST(Mle, InsensitiveToStart) {
  const auto data = fixtures::fixture_data();
  const auto ref = fit_mle(data).params.to_array();
  ModelParams start;
  start.risk[0] = {1.0, -0.5, 2.0};
  start.risk[1] = {0.5, -3.0, 0.5};
  const auto fit = fit_mle(data, start);
  ASSERT_TRUE(fit.converged);
  const auto v = fit.params.to_array();
  for (std::size_t i = 0; i < 6; ++i) EXPECT_NEAR(v[i], ref[i], 1e-4);
}

TEST(Mle, RecoversTruthOnLargeSample) {
  const auto truth = ModelParams::from_array(fixtures::kReferenceMle);
  const DesignSpec d(StressFrame::from_kelvin(293.0, 320.2136, 353.0), 3.0, 6.0,
                     20000);
  const auto fit = fit_mle(simulate_dataset(truth, d, {11, 0}));
  ASSERT_TRUE(fit.converged);
  const auto v = fit.params.to_array();
  for (std::size_t i = 0; i < 6; ++i) {
    EXPECT_NEAR(v[i], fixtures::kReferenceMle[i],
                0.1 * (1.0 + std::abs(fixtures::kReferenceMle[i])));
  }
}

TEST(Mle, EmptyCellIsNonIdentifiable) {
  const auto design = fixtures::fixture_design().with_n(3);
  // No cause-2 failure in phase 1.
  const Dataset data(design, {{1.0, 1}, {5.5, 2}, {5.6, 1}});
  EXPECT_THROW(require_identifiable(data), NonIdentifiable);
  EXPECT_THROW(fit_mle(data), NonIdentifiable);
}

namespace {

// Step function F_n(t) = #{failures <= t} / n and its left limit, compared
// with F on the jump points and a dense grid.
EdfStatistics brute_force_edf(const Dataset& data, const ModelParams& p) {
  std::vector<double> fails;
  for (const auto& o : data.observations()) {
    if (!o.censored()) fails.push_back(o.time);
  }
  const double n = static_cast<double>(data.size());
  auto fn = [&](double t, bool left) {
    int c = 0;
    for (double f : fails) c += left ? (f < t) : (f <= t);
    return c / n;
  };
  EdfStatistics s;
  const std::set<double> jumps(fails.begin(), fails.end());
  for (double t : jumps) {
    const double f = overall_cdf(p, data.design(), t);
    s.ks = std::max({s.ks, std::abs(fn(t, false) - f), std::abs(fn(t, true) - f)});
    s.cvm += std::pow(fn(t, false) - f, 2);
  }
  s.cvm /= static_cast<double>(jumps.size());
  for (int i = 1; i < 20000; ++i) {
    const double t = data.design().tc() * i / 20000.0;
    s.ks = std::max(s.ks, std::abs(fn(t, false) - overall_cdf(p, data.design(), t)));
  }
  return s;
}

}  // namespace

TEST(Edf, MatchesBruteForce) {
  const auto data = fixtures::fixture_data();
  const auto fit = fit_mle(data);
  const auto s = edf_statistics(data, fit.params);
  const auto o = brute_force_edf(data, fit.params);
  EXPECT_NEAR(s.ks, o.ks, 1e-12);
  EXPECT_NEAR(s.cvm, o.cvm, 1e-12);
  // Reference KS 0.0946; the definition here lands within 0.02 of it.
  EXPECT_NEAR(s.ks, 0.0946, 0.02);
}

TEST(Edf, TiesCollapseToOneJump) {
  const auto design = fixtures::fixture_design().with_n(4);
  const Dataset data(design, {{1.0, 1}, {1.0, 2}, {5.5, 2}, {6.0, 0}});
  const auto p = ModelParams::from_array(fixtures::kReferenceMle);
  const auto curve = edf_curve(data, p);
  ASSERT_EQ(curve.size(), 2u);
  EXPECT_DOUBLE_EQ(curve[0].empirical, 0.5);
  EXPECT_DOUBLE_EQ(curve[1].empirical, 0.75);
  const auto s = edf_statistics(data, p);
  const auto o = brute_force_edf(data, p);
  EXPECT_NEAR(s.ks, o.ks, 1e-12);
  EXPECT_NEAR(s.cvm, o.cvm, 1e-12);
}

TEST(Gof, AddOnePvalue) {
  EXPECT_DOUBLE_EQ(bootstrap_pvalue(1.0, {}), 1.0);
  EXPECT_DOUBLE_EQ(bootstrap_pvalue(1.0, {0.5}), 0.5);
  EXPECT_DOUBLE_EQ(bootstrap_pvalue(1.0, {1.0}), 1.0);
  EXPECT_DOUBLE_EQ(bootstrap_pvalue(1.0, {2.0, 0.1, 0.2, 3.0}), 0.6);
}

TEST(Gof, SerialAndParallelIdentical) {
  const auto data = fixtures::fixture_data();
  const auto fit = fit_mle(data);
  const auto a = gof_bootstrap(data, fit, 40, {3, 1}, {.threads = 1});
  const auto b = gof_bootstrap(data, fit, 40, {3, 1}, {.threads = 4});
  EXPECT_EQ(a.ks_pvalue, b.ks_pvalue);
  EXPECT_EQ(a.cvm_pvalue, b.cvm_pvalue);
  EXPECT_EQ(a.n_regenerated, b.n_regenerated);
  EXPECT_EQ(a.n_boot, 40);
  const auto s = edf_statistics(data, fit.params);
  EXPECT_EQ(a.ks_stat, s.ks);
  EXPECT_EQ(a.cvm_stat, s.cvm);
}

TEST(Gof, PvaluesRoughlyUniformUnderTheModel) {
  // Data drawn from the fitted model: the bootstrap p-value of a well
  // calibrated test should not pile up near zero.
  const auto truth = fixtures::fixture_mle();
  const auto design = fixtures::fixture_design();
  int small = 0, used = 0;
  const int reps = 20;
  for (int r = 0; r < reps; ++r) {
    const auto data = simulate_dataset(truth, design, {17, static_cast<std::uint64_t>(r)});
    try {
      const auto fit = fit_mle(data);
      // Samples whose likelihood peaks on the b = 0 boundary do not converge.
      if (!fit.converged) continue;
      const auto g = gof_bootstrap(data, fit, 49, {18, static_cast<std::uint64_t>(r)});
      small += g.ks_pvalue < 0.05;
      ++used;
    } catch (const NonIdentifiable&) {
    }
  }
  EXPECT_GE(used, 15);
  EXPECT_LE(small, 4);
}

TEST(Mle, BoundarySupremumReportedAsNotConverged) {
  // Seed found by scanning: this replicate's likelihood increases towards
  // b2 = 0, so there is no interior maximum.
  const auto truth = ModelParams::from_array(fixtures::kReferenceMle);
  const auto data = simulate_dataset(truth, fixtures::fixture_design(), {17, 7});
  const auto fit = fit_mle(data);
  EXPECT_FALSE(fit.converged);
  EXPECT_GT(fit.params.risk[1].b, -1e-6);
}
