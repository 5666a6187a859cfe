#include <benchmark/benchmark.h>

#include <vector>

#include "tanks/simulation_engine.hpp"

namespace {

using namespace tanks;

void BM_ControlV(benchmark::State& state) {
  const PlantParams p;
  const DerivedParams dp = DerivedParams::from(p);
  const ReferencePoint ref = make_reference(0.48, p);
  const ErrorState eta = to_error({0.40, 0.10}, ref);
  for (auto _ : state) {
    benchmark::DoNotOptimize(control_v(eta, Gains{}, ref, dp, ref.u_s));
  }
}
BENCHMARK(BM_ControlV);

void BM_IntegrateStep(benchmark::State& state) {
  const PlantParams p;
  const auto method = static_cast<Integrator>(state.range(0));
  PlantState s{0.40, 0.10};
  for (auto _ : state) {
    s = integrate_step(s, 5e-5, p, 0.01, method);
    benchmark::DoNotOptimize(s);
  }
}
BENCHMARK(BM_IntegrateStep)
    ->Arg(static_cast<int>(Integrator::rk4))
    ->Arg(static_cast<int>(Integrator::euler));

Scenario tracking_scenario() {
  Scenario s;
  s.setpoints = {{0.0, 0.8}, {600.0, 0.5}};
  s.sim.t_end = 1200.0;
  return s;
}

void BM_RunTracking(benchmark::State& state) {
  Scenario s = tracking_scenario();
  s.sim.dt = 1.0 / static_cast<double>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(run(s));
  }
  state.SetItemsProcessed(state.iterations() *
                          static_cast<long>(s.sim.samples()));
}
BENCHMARK(BM_RunTracking)->Arg(10)->Arg(100)->Unit(benchmark::kMillisecond);

void BM_GainSweep3x3(benchmark::State& state) {
  const Scenario s = tracking_scenario();
  const std::vector<double> grid = {0.02, 0.05, 0.2};
  const auto threads = static_cast<unsigned>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(gain_sweep(s, grid, grid, threads));
  }
}
BENCHMARK(BM_GainSweep3x3)->Arg(1)->Arg(0)->Unit(benchmark::kMillisecond)
    ->UseRealTime();

}  // namespace

BENCHMARK_MAIN();
