// SPDX-License-Identifier: Apache-2.0
#include <benchmark/benchmark.h>

#include "ftprep/executor.hpp"
#include "ftprep/gates.hpp"
#include "ftprep/steane.hpp"

using namespace ftprep;

namespace {

DensityMatrix noisy_ft_state(double p, int steps) {
  // a representative mid-circuit state: run a prefix of the FT circuit
  const Circuit ft = steane::ft_circuit();
  Circuit prefix;
  prefix.num_qubits = ft.num_qubits;
  prefix.classical_bits = ft.classical_bits;
  prefix.steps.assign(ft.steps.begin(), ft.steps.begin() + steps);
  CircuitExecutor ex(prefix, DensityMatrix::basis_state(12, std::string(12, '0')), NoiseModel{p});
  while (ex.advance() == CircuitExecutor::Phase::kNeedOutcome) ex.supply_outcome(0);
  return std::move(ex).take_state();
}

void DirectCircuitNoiseless(benchmark::State& state) {
  const Circuit c = steane::direct_circuit();
  const auto init = DensityMatrix::basis_state(7, "0000000");
  for (auto _ : state) {
    auto r = run_circuit(c, init, NoiseModel{0}, "");
    benchmark::DoNotOptimize(r.state.trace());
  }
}
BENCHMARK(DirectCircuitNoiseless);

void DirectCircuitNoisy(benchmark::State& state) {
  const Circuit c = steane::direct_circuit();
  const auto init = DensityMatrix::basis_state(7, "0000000");
  const double p = 1e-4;
  for (auto _ : state) {
    auto r = run_circuit(c, init, NoiseModel{p}, "");
    benchmark::DoNotOptimize(steane::success_probability(r.state));
  }
}
BENCHMARK(DirectCircuitNoisy);

void DepolarizeAllQubits(benchmark::State& state) {
  const double p = std::pow(10.0, -static_cast<double>(state.range(0)));
  auto dm = noisy_ft_state(p, 30);
  const NoiseModel nm{p};
  for (auto _ : state) {
    depolarize_all(dm, nm);
    benchmark::DoNotOptimize(dm.trace());
  }
  state.counters["nonzeros"] = static_cast<double>(dm.nonzero_count());
}
BENCHMARK(DepolarizeAllQubits)->Arg(3)->Arg(4)->Arg(6);

void TwoQubitGateSparse(benchmark::State& state) {
  const double p = std::pow(10.0, -static_cast<double>(state.range(0)));
  auto dm = noisy_ft_state(p, 30);
  const Mat4 cx = gates::cnot();
  for (auto _ : state) {
    dm.apply_two_qubit(7, 3, cx);
    benchmark::DoNotOptimize(dm.trace());
  }
  state.counters["nonzeros"] = static_cast<double>(dm.nonzero_count());
}
BENCHMARK(TwoQubitGateSparse)->Arg(3)->Arg(4)->Arg(6);

void LeafSideSweep(benchmark::State& state) {
  const auto leaf = static_cast<std::uint32_t>(state.range(0));
  const SparseOptions opts{leaf, kDefaultPruneTol};
  const Circuit c = steane::direct_circuit();
  const auto init = DensityMatrix::basis_state(7, "0000000", Backend::kSparse, opts);
  for (auto _ : state) {
    auto r = run_circuit(c, init, NoiseModel{1e-3}, "");
    benchmark::DoNotOptimize(r.state.trace());
  }
}
BENCHMARK(LeafSideSweep)->Arg(1)->Arg(2)->Arg(4)->Arg(8)->Arg(16);

}  // namespace

BENCHMARK_MAIN();
