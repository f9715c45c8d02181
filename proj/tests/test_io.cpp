#include <gtest/gtest.h>

#include <unistd.h>

#include <filesystem>
#include <functional>
#include <fstream>
#include <sstream>

#include "fixtures.hpp"
#include "ssalt/config.hpp"
#include "ssalt/errors.hpp"
#include "ssalt/io.hpp"

using namespace ssalt;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir() {
  const auto d = fs::temp_directory_path() /
                 ("ssalt_io_test_" + std::to_string(::getpid()));
  fs::create_directories(d);
  return d;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

std::string error_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const std::exception& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST(Csv, FixtureLoads) {
  const auto data = fixtures::fixture_data();
  EXPECT_EQ(data.size(), 35u);
  EXPECT_EQ(data.n_failures(), 31);
  const auto c = data.failure_counts();
  EXPECT_EQ(c[0][0] + c[0][1] + c[1][0] + c[1][1], 31);
}

TEST(Csv, ParseObservationsErrorsCarryLineNumbers) {
  EXPECT_EQ(io::parse_observations("time,cause\n1.5,1\n2.0,2\n", "ok.csv").size(), 2u);
  const auto bad = error_of([] { io::parse_observations("time,cause\n1.0,1\n1.2,3\n", "x.csv"); });
  EXPECT_NE(bad.find("x.csv:3: cause 3 is not one of 0 (censored), 1, 2"),
            std::string::npos) << bad;
  const auto neg = error_of([] { io::parse_observations("time,cause\n-1.0,1\n", "y.csv"); });
  EXPECT_NE(neg.find("y.csv:2:"), std::string::npos) << neg;
  const auto txt = error_of([] { io::parse_observations("time,cause\nabc,1\n", "z.csv"); });
  EXPECT_NE(txt.find("z.csv:2:"), std::string::npos) << txt;
  const auto hdr = error_of([] { io::parse_observations("t,c\n1,1\n", "h.csv"); });
  EXPECT_NE(hdr.find("h.csv:1:"), std::string::npos) << hdr;
  const auto empty = error_of([] { io::parse_observations("", "e.csv"); });
  EXPECT_NE(empty.find("e.csv:0: empty file"), std::string::npos) << empty;
}

TEST(Csv, CountMismatchIsDataError) {
  const auto dir = scratch_dir();
  io::write_text(dir / "short.csv", "time,cause\n1.0,1\n6.0,0\n");
  EXPECT_THROW(io::read_dataset_csv(dir / "short.csv", fixtures::fixture_design()),
               DataError);
  EXPECT_THROW(io::read_dataset_csv(dir / "missing.csv", fixtures::fixture_design()),
               DataError);
}

TEST(Csv, RoundTrip) {
  const auto dir = scratch_dir();
  const auto data = fixtures::fixture_data();
  io::write_dataset_csv(dir / "rt.csv", data);
  const auto back = io::read_dataset_csv(dir / "rt.csv", data.design());
  ASSERT_EQ(back.size(), data.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    EXPECT_EQ(back.observations()[i].time, data.observations()[i].time);
    EXPECT_EQ(back.observations()[i].cause, data.observations()[i].cause);
  }
}

TEST(Csv, OutputHeaders) {
  const auto dir = scratch_dir();
  std::vector<CriterionPoint> grid(1);
  grid[0].x1 = 0.5;
  grid[0].tau = 3.0;
  grid[0].c1_raw = 0.25;
  grid[0].c2_raw = 0.1;
  grid[0].n_used = 4;
  io::write_grid_csv(dir / "grid.csv", grid);
  const auto g = slurp(dir / "grid.csv");
  EXPECT_EQ(g.substr(0, g.find('\n')),
            "x1,tau,c1_raw,c2_raw,n_used,n_discarded,n_refitted");
  const auto surface = smooth_and_optimise_1d(grid, 1.0);
  io::write_optimum_csv(dir / "opt.csv", surface);
  const auto o = slurp(dir / "opt.csv");
  EXPECT_EQ(o.substr(0, o.find('\n')), "criterion,x1,tau,value");
  io::write_edf_csv(dir / "edf.csv", {{1.0, 0.1, 0.12}});
  EXPECT_NE(slurp(dir / "edf.csv").find("1,0.1,0.12"), std::string::npos);
}

TEST(Config, FixturePresetParses) {
  const auto cfg = load_config(fixtures::config_dir() + "/fixture.json");
  EXPECT_EQ(cfg.seed, 2026u);
  const auto& d = cfg.require_data();
  EXPECT_TRUE(fs::exists(d.path));
  EXPECT_EQ(d.design.n(), 35);
  EXPECT_DOUBLE_EQ(d.design.tau(), 5.0);
  const auto& prior = cfg.require_prior();
  const auto reference = fixtures::reference_prior(0);
  for (std::size_t k = 0; k < 6; ++k) {
    if (k == 5) continue;  // see ReferenceShapeForPhi32IsOffByRounding
    EXPECT_NEAR(prior.component[k].alpha, reference.component[k].alpha, 5e-3);
  }
  EXPECT_EQ(cfg.sampler.n_chains, 3);
}

TEST(Config, EveryPresetParses) {
  for (const auto& e : fs::directory_iterator(fixtures::config_dir())) {
    if (e.path().extension() != ".json") continue;
    EXPECT_NO_THROW(load_config(e.path())) << e.path();
  }
}

TEST(Config, ViolationsNameTheModule) {
  const auto bad_grid = error_of([] {
    parse_config(R"({"plan": {"tau_grid": {"lo": 0.05, "hi": 7.0, "m": 5}}})");
  });
  EXPECT_NE(bad_grid.find("design-criteria: tau grid needs 0 < lo <= hi < tc"),
            std::string::npos) << bad_grid;
  const auto bad_sampler =
      error_of([] { parse_config(R"({"sampler": {"target_accept": 1.5}})"); });
  EXPECT_NE(bad_sampler.find("mcmc:"), std::string::npos) << bad_sampler;
  const auto bad_prior = error_of([] {
    parse_config(R"({"prior": {"q": 0.01, "alpha": [1,1,1,1,1,-1], "lambda": [1,1,1,1,1,1]}})");
  });
  EXPECT_NE(bad_prior.find("prior:"), std::string::npos) << bad_prior;
  const auto not_json = error_of([] { parse_config("{oops"); });
  EXPECT_NE(not_json.find("config:"), std::string::npos) << not_json;
  EXPECT_THROW(parse_config("{}").require_data(), ConfigError);
}

TEST(Config, ExplicitHyperparameters) {
  const auto cfg = parse_config(
      R"({"prior": {"q": 0.05, "alpha": [1,2,3,4,5,6], "lambda": [6,5,4,3,2,1]}})");
  const auto& p = cfg.require_prior();
  EXPECT_DOUBLE_EQ(p.q, 0.05);
  EXPECT_DOUBLE_EQ(p.component[2].alpha, 3.0);
  EXPECT_DOUBLE_EQ(p.component[2].lambda, 4.0);
  EXPECT_EQ(p.flavour, PriorFlavour::Custom);
}
