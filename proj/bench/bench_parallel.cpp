// Serial reference vs OpenMP kernels on the two hot loops: the goodness-of-fit
// bootstrap and the design-grid Monte Carlo.

#include <benchmark/benchmark.h>

#include "ssalt/design.hpp"
#include "ssalt/io.hpp"
#include "ssalt/mle.hpp"

using namespace ssalt;

namespace {

DesignSpec fixture_design() {
  return {StressFrame::from_kelvin(293.0, 293.0, 353.0), 5.0, 6.0, 35};
}

const Dataset& fixture() {
  static const Dataset d =
      io::read_dataset_csv(std::string(SSALT_DATA_DIR) + "/solar_lighting.csv",
                           fixture_design());
  return d;
}

Execution exec_for(const benchmark::State& state) {
  return {static_cast<int>(state.range(0))};
}

void BM_GofBootstrap(benchmark::State& state) {
  const auto fit = fit_mle(fixture());
  for (auto _ : state) {
    auto r = gof_bootstrap(fixture(), fit, 200, {1, 1}, exec_for(state));
    benchmark::DoNotOptimize(r);
  }
}

void BM_EvaluateGrid(benchmark::State& state) {
  const auto fit = fit_mle(fixture());
  CriterionSetup setup;
  setup.truth = fit.params;
  setup.replicates = 2;
  setup.sampler.iter_warmup = 200;
  setup.sampler.iter_sampling = 200;
  for (std::size_t k = 0; k < 6; ++k) setup.prior.component[k] = {2.0, 1.0};
  const DesignSpec base(StressFrame::from_kelvin(293.0, 320.2136, 353.0), 3.0,
                        6.0, 35);
  std::vector<DesignSpec> designs;
  for (double tau : {1.0, 3.0, 5.0}) designs.push_back(base.with_tau(tau));
  for (auto _ : state) {
    auto r = evaluate_grid(designs, setup, {1, 2}, exec_for(state));
    benchmark::DoNotOptimize(r);
  }
}

}  // namespace

// Argument: thread count; 1 selects the serial reference path, 0 the OpenMP
// default.
BENCHMARK(BM_GofBootstrap)->Arg(1)->Arg(0)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_EvaluateGrid)->Arg(1)->Arg(0)->Unit(benchmark::kMillisecond)
    ->Iterations(1);

BENCHMARK_MAIN();
