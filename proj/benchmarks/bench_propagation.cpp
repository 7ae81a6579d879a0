#include <benchmark/benchmark.h>

#include "otto/engine.hpp"
#include "otto/metrics.hpp"

namespace {

using namespace otto;

PropagationSettings settings_for(bool parity) {
  PropagationSettings s;
  s.exploit_parity = parity;
  return s;
}

void BM_ControlledAdiabat(benchmark::State& state) {
  const FockBasis basis(static_cast<int>(state.range(0)));
  const DensityMatrix rho = thermal_state(1.0, 1.0, basis);
  const RampSchedule ramp(1.0, 2.5, 1.0);
  const PropagationSettings s = settings_for(state.range(1) != 0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(evolve_adiabat(rho, ramp, true, s).work);
  }
  state.SetItemsProcessed(state.iterations() * s.min_steps);
}
BENCHMARK(BM_ControlledAdiabat)
    ->ArgsProduct({{40, 80}, {0, 1}})
    ->ArgNames({"dim", "parity"})
    ->Unit(benchmark::kMillisecond);

void BM_Thermalization(benchmark::State& state) {
  const FockBasis basis(80);
  const DensityMatrix rho = thermal_state(1.0, 1.0, basis);
  const ThermalChannel bath(0.22, 2.5, 10.0);
  const PropagationSettings s = settings_for(state.range(0) != 0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(evolve_gkls(rho, bath, 1.0, s).heat);
  }
}
BENCHMARK(BM_Thermalization)->Arg(0)->Arg(1)->ArgName("parity")->Unit(benchmark::kMillisecond);

void BM_ShortcutToEquilibrium(benchmark::State& state) {
  const FockBasis basis(80);
  const DensityMatrix rho = thermal_state(2.5, 2.5, basis);
  const RampSchedule beta(0.4, 0.1, 1.0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(evolve_ste(rho, 2.5, beta).heat);
  }
}
BENCHMARK(BM_ShortcutToEquilibrium)->Unit(benchmark::kMillisecond);

void BM_Cycle(benchmark::State& state) {
  EngineConfig c;
  c.variant = static_cast<Variant>(state.range(0));
  c.tau_adi = 0.7;
  c.tau_iso = 0.7;
  const DensityMatrix rho = thermal_state(c.omega_c, c.T_c, c.basis());
  for (auto _ : state) {
    benchmark::DoNotOptimize(run_cycle(rho, c).power);
  }
}
BENCHMARK(BM_Cycle)->DenseRange(0, 2)->ArgName("variant")->Unit(benchmark::kMillisecond);

void BM_Fidelity(benchmark::State& state) {
  const FockBasis basis(80);
  const DensityMatrix a = thermal_state(1.0, 1.0, basis);
  const DensityMatrix b = thermal_state(2.5, 10.0, basis);
  for (auto _ : state) {
    benchmark::DoNotOptimize(uhlmann_fidelity(a, b));
  }
}
BENCHMARK(BM_Fidelity)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
