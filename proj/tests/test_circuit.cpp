// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include "ftprep/executor.hpp"
#include "ftprep/steane.hpp"
#include "test_support.hpp"

using namespace ftprep;
using namespace ftprep::testing;

namespace {

Circuit h_then_measure() {
  Circuit c;
  c.num_qubits = 1;
  c.classical_bits = 1;
  c.steps.push_back({{GateOp::unitary1(0, gates::hadamard())}});
  c.steps.push_back({{GateOp::measure(0, 0)}});
  return c;
}

}  // namespace

TEST_CASE("stats") {
  CHECK(stats(steane::direct_circuit()) == CircuitStats{7, 3, 21, 9});
  const CircuitStats ft = stats(steane::ft_circuit());
  CHECK(ft.qubits == 12);
  CHECK(ft.depth >= 60);
  CHECK(ft.area >= 720);
  CHECK(ft.gate_ops >= 108);

  Circuit empty;
  empty.num_qubits = 3;
  CHECK(stats(empty) == CircuitStats{3, 0, 0, 0});
}

TEST_CASE("validate") {
  CHECK(validate(steane::direct_circuit()).empty());
  CHECK(validate(steane::ft_circuit()).empty());

  SUBCASE("disjointness violation") {
    Circuit c;
    c.num_qubits = 2;
    c.steps.push_back({{GateOp::unitary1(0, gates::hadamard()), GateOp::unitary2(0, 1, gates::cnot())}});
    const auto v = validate(c);
    REQUIRE(v.size() == 1);
    CHECK(v[0].find("used by two gates") != std::string::npos);
  }
  SUBCASE("unwritten bit read") {
    Circuit c;
    c.num_qubits = 1;
    c.classical_bits = 1;
    c.steps.push_back({{GateOp::controlled_pauli(0, PauliError::kX, ParityCond{{0}, false})}});
    const auto v = validate(c);
    REQUIRE(v.size() == 1);
    CHECK(v[0].find("unwritten bit") != std::string::npos);
  }
  SUBCASE("width violation") {
    Circuit c;
    c.num_qubits = 1;
    c.steps.push_back({{GateOp::unitary1(1, gates::hadamard())}});
    CHECK(validate(c).size() == 1);
  }
  SUBCASE("overlapping retry blocks") {
    Circuit c = h_then_measure();
    c.retry_blocks.push_back({0, 1, ParityCond{{0}, false}, 1});
    c.retry_blocks.push_back({1, 1, ParityCond{{0}, false}, 1});
    CHECK(validate(c).empty());  // nested is fine
    c.retry_blocks.clear();
    c.steps.push_back({{GateOp::measure(0, 0)}});
    c.retry_blocks.push_back({0, 1, ParityCond{{0}, false}, 1});
    c.retry_blocks.push_back({1, 2, ParityCond{{0}, false}, 1});
    CHECK(validate(c).size() == 1);  // partial overlap
  }
}

TEST_CASE("run with forced scenarios") {
  const Circuit c = h_then_measure();
  const auto init = DensityMatrix::basis_state(1, "0");
  SUBCASE("each branch has probability 1/2 and they sum to 1") {
    const RunResult r0 = run_circuit(c, init, NoiseModel{0}, "0");
    const RunResult r1 = run_circuit(c, init, NoiseModel{0}, "1");
    CHECK(r0.probability == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(r1.probability == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(r0.probability + r1.probability == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(r1.state.element(1, 1) - Amp{1}) < 1e-12);
  }
  SUBCASE("scenario exhaustion") {
    CHECK_THROWS_AS(run_circuit(c, init, NoiseModel{0}, ""), ScenarioExhausted);
  }
  SUBCASE("identical forced bits give identical states at p=0") {
    const RunResult a = run_circuit(c, init, NoiseModel{0}, "0");
    const RunResult b = run_circuit(c, init, NoiseModel{0}, "00");  // extra digit unused
    CHECK(DensityMatrix::max_abs_diff(a.state, b.state) == 0.0);
    CHECK(a.digits == "0");
  }
}

TEST_CASE("noiseless direct circuit emits the exact codeword") {
  const Circuit c = steane::direct_circuit();
  const auto init = DensityMatrix::basis_state(7, "0000000");
  const RunResult r = run_circuit(c, init, NoiseModel{0}, "");
  CHECK(r.probability == 1.0);
  const auto target = steane::codeword_state(steane::Codeword::kZeroL);
  CHECK(r.state.overlap(target) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(r.max_trace_drift < 1e-12);
}

TEST_CASE("gate fusion equals two separate steps at p=0") {
  std::mt19937_64 rng(41);
  auto fused_state = DensityMatrix::basis_state(3, "000");
  for (const auto& op : random_program(rng, 3, 10)) apply_program_op(fused_state, op);
  auto split_state = fused_state;

  Circuit fused;
  fused.num_qubits = 3;
  fused.steps.push_back({{GateOp::unitary2(1, 2, gates::h_then_cnot())}});
  Circuit split;
  split.num_qubits = 3;
  split.steps.push_back({{GateOp::unitary1(1, gates::hadamard())}});
  split.steps.push_back({{GateOp::unitary2(1, 2, gates::cnot())}});

  const RunResult rf = run_circuit(fused, fused_state, NoiseModel{0}, "");
  const RunResult rs = run_circuit(split, split_state, NoiseModel{0}, "");
  CHECK(DensityMatrix::max_abs_diff(rf.state, rs.state) < 1e-12);
}

TEST_CASE("retry blocks") {
  // Prepare |1>, measure; on a 1 the guard triggers a reset-and-remeasure
  // pass, so the final bit reads 0.
  Circuit c;
  c.num_qubits = 1;
  c.classical_bits = 1;
  c.steps.push_back({{GateOp::reset(0)}});
  c.steps.push_back({{GateOp::unitary1(0, gates::pauli_x())}});
  c.steps.push_back({{GateOp::measure(0, 0)}});
  c.retry_blocks.push_back({0, 2, ParityCond{{0}, false}, 1});
  // Second pass hits the X again, so outcome stays 1: scenario needs 2 digits.
  const auto init = DensityMatrix::basis_state(1, "0");
  const RunResult r = run_circuit(c, init, NoiseModel{0}, "11");
  CHECK(r.probability == doctest::Approx(1.0));
  CHECK(r.digits == "11");
  CHECK(r.bits[0] == 1);
}

TEST_CASE("injection fires once inside a retried span") {
  // Retry block re-runs the measurement after a forced X injection; the
  // injected error must not re-fire on the second pass.
  Circuit c;
  c.num_qubits = 1;
  c.classical_bits = 1;
  c.steps.push_back({{GateOp::reset(0)}});
  c.steps.push_back({{GateOp::measure(0, 0)}});
  c.retry_blocks.push_back({0, 1, ParityCond{{0}, false}, 1});
  ExecOptions opts;
  opts.injections = {Injection{0, 0, PauliError::kX}};
  const auto init = DensityMatrix::basis_state(1, "0");
  // First pass measures 1 (injected flip), guard retries, reset clears the
  // qubit, no second injection: second measurement is deterministically 0.
  const RunResult r = run_circuit(c, init, NoiseModel{0}, "10", opts);
  CHECK(r.digits == "10");
  CHECK(r.probability == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(r.bits[0] == 0);
}

TEST_CASE("classically controlled pauli") {
  Circuit c;
  c.num_qubits = 2;
  c.classical_bits = 1;
  c.steps.push_back({{GateOp::unitary1(0, gates::hadamard())}});
  c.steps.push_back({{GateOp::measure(0, 0)}});
  c.steps.push_back({{GateOp::controlled_pauli(1, PauliError::kX, ParityCond{{0}, false})}});
  const auto init = DensityMatrix::basis_state(2, "00");
  const RunResult r1 = run_circuit(c, init, NoiseModel{0}, "1");
  CHECK(std::abs(r1.state.element(3, 3) - Amp{1}) < 1e-12);  // X applied
  const RunResult r0 = run_circuit(c, init, NoiseModel{0}, "0");
  CHECK(std::abs(r0.state.element(0, 0) - Amp{1}) < 1e-12);  // X skipped
}

TEST_CASE("serialization round trip") {
  for (const Circuit& c : {steane::direct_circuit(), steane::ft_circuit(), h_then_measure()}) {
    const std::string text = circuit_to_json(c);
    const Circuit back = circuit_from_json(text);
    CHECK(back == c);
  }
}

TEST_CASE("noise applies to every qubit after every step") {
  // A single idle qubit beside a gated one still depolarizes.
  Circuit c;
  c.num_qubits = 2;
  c.steps.push_back({{GateOp::unitary1(0, gates::hadamard())}});
  const auto init = DensityMatrix::basis_state(2, "01");  // qubit 1 idle in |1>
  const RunResult r = run_circuit(c, init, NoiseModel{0.3}, "");
  // the idle qubit keeps |1> with probability 1 - 2p/3
  CHECK(r.state.outcome_probability(1, 1) == doctest::Approx(1.0 - 0.2).epsilon(1e-12));
}
