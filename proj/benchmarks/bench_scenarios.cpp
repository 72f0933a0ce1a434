// SPDX-License-Identifier: Apache-2.0
#include <benchmark/benchmark.h>

#include "ftprep/analysis.hpp"

using namespace ftprep;

namespace {

void FtNoiselessEnumeration(benchmark::State& state) {
  const Circuit ft = steane::ft_circuit();
  const auto init = DensityMatrix::basis_state(12, std::string(12, '0'));
  for (auto _ : state) {
    EnumerateOptions eo;
    eo.mass_target = 1.0;
    const AggregateResult agg = enumerate_scenarios(ft, init, NoiseModel{0}, steane_scorer(), eo);
    benchmark::DoNotOptimize(agg.weighted_fidelity);
  }
}
BENCHMARK(FtNoiselessEnumeration)->Unit(benchmark::kMillisecond);

// Records the scenario count needed for a 1-1e-6 mass target at p = 1e-3.
void FtEnumerationAtP(benchmark::State& state) {
  const Circuit ft = steane::ft_circuit();
  const auto init = DensityMatrix::basis_state(12, std::string(12, '0'));
  const double p = std::pow(10.0, -static_cast<double>(state.range(0)));
  std::size_t scenarios = 0;
  for (auto _ : state) {
    EnumerateOptions eo;
    eo.mass_target = 1.0 - 1e-6;
    const AggregateResult agg = enumerate_scenarios(ft, init, NoiseModel{p}, steane_scorer(), eo);
    scenarios = agg.scenarios_explored;
    benchmark::DoNotOptimize(agg.weighted_fidelity);
  }
  state.counters["scenarios"] = static_cast<double>(scenarios);
}
BENCHMARK(FtEnumerationAtP)->Arg(3)->Arg(5)->Unit(benchmark::kMillisecond);

void SweepPointEvaluation(benchmark::State& state) {
  const Circuit direct = steane::direct_circuit();
  const Circuit ft = steane::ft_circuit();
  const Config cfg = Config::defaults();
  const double p = std::pow(10.0, -static_cast<double>(state.range(0)));
  for (auto _ : state) {
    const SweepPoint pt = evaluate_point(direct, ft, p, cfg);
    benchmark::DoNotOptimize(pt.f_ft);
  }
}
BENCHMARK(SweepPointEvaluation)->Arg(5)->Unit(benchmark::kMillisecond);

}  // namespace
