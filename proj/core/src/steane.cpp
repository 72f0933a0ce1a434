// SPDX-License-Identifier: Apache-2.0
#include "ftprep/steane.hpp"

#include <bit>
#include <cmath>
#include <stdexcept>

#include "ftprep/gates.hpp"

namespace ftprep::steane {

const std::array<std::uint32_t, 8>& codeword_basis_states(Codeword w) {
  static const std::array<std::uint32_t, 8> zero = {0b0000000, 0b1010101, 0b0110011, 0b1100110,
                                                    0b0001111, 0b1011010, 0b0111100, 0b1101001};
  static const std::array<std::uint32_t, 8> one = {0b1111111, 0b0101010, 0b1001100, 0b0011001,
                                                   0b1110000, 0b0100101, 0b1000011, 0b0010110};
  return w == Codeword::kZeroL ? zero : one;
}

std::array<std::uint32_t, 3> x_generator_masks() { return {0b1010101, 0b0110011, 0b0001111}; }

std::array<std::array<int, 4>, 3> generator_supports() {
  std::array<std::array<int, 4>, 3> out{};
  const auto masks = x_generator_masks();
  for (int g = 0; g < 3; ++g) {
    int k = 0;
    for (int q = 0; q < kDataQubits; ++q)
      if (masks[static_cast<std::size_t>(g)] & (1u << (kDataQubits - 1 - q)))
        out[static_cast<std::size_t>(g)][static_cast<std::size_t>(k++)] = q;
  }
  return out;
}

DensityMatrix codeword_state(Codeword w, Backend backend, SparseOptions opts) {
  std::vector<std::pair<std::uint64_t, Amp>> amps;
  const double a = 1.0 / std::sqrt(8.0);
  for (std::uint32_t s : codeword_basis_states(w)) amps.emplace_back(s, Amp{a});
  return DensityMatrix::from_state_vector(kDataQubits, amps, backend, opts);
}

Circuit direct_circuit() {
  Circuit c;
  c.num_qubits = kDataQubits;
  c.classical_bits = 0;
  const Mat4 hc = gates::h_then_cnot();
  const Mat4 cx = gates::cnot();
  c.steps.push_back({{GateOp::unitary2(0, 2, hc), GateOp::unitary2(1, 6, hc), GateOp::unitary2(3, 4, hc)}});
  c.steps.push_back({{GateOp::unitary2(0, 6, cx), GateOp::unitary2(1, 2, cx), GateOp::unitary2(3, 5, cx)}});
  c.steps.push_back({{GateOp::unitary2(0, 4, cx), GateOp::unitary2(1, 5, cx), GateOp::unitary2(3, 6, cx)}});
  return c;
}

int ft_verifier_bit(int generator, int round) { return generator * 4 + round * 2; }
int ft_syndrome_bit(int generator, int round) { return generator * 4 + round * 2 + 1; }
std::array<int, 3> correction_qubits() { return {0, 1, 3}; }

namespace {

// Appends one verified-cat syndrome-extraction round for `generator`;
// returns the (first_step, last_verify_step) pair of the appended block.
std::pair<int, int> append_round(Circuit& c, int generator, int round) {
  const int a1 = 7, a2 = 8, a3 = 9, a4 = 10, v = kVerifierQubit;
  const Mat2 h = gates::hadamard();
  const Mat4 cx = gates::cnot();
  const auto supp = generator_supports()[static_cast<std::size_t>(generator)];

  const int first = static_cast<int>(c.steps.size());
  c.steps.push_back({{GateOp::reset(a1), GateOp::reset(a2), GateOp::reset(a3), GateOp::reset(a4),
                      GateOp::reset(v)}});
  c.steps.push_back({{GateOp::unitary1(a1, h)}});
  c.steps.push_back({{GateOp::unitary2(a1, a2, cx)}});
  c.steps.push_back({{GateOp::unitary2(a1, a3, cx)}});
  c.steps.push_back({{GateOp::unitary2(a1, a4, cx)}});
  c.steps.push_back({{GateOp::unitary2(a1, v, cx)}});
  c.steps.push_back({{GateOp::unitary2(a4, v, cx)}});
  c.steps.push_back({{GateOp::measure(v, ft_verifier_bit(generator, round))}});
  const int verify_end = static_cast<int>(c.steps.size()) - 1;
  // cat verification: one repeat on failure
  c.retry_blocks.push_back({first, verify_end, ParityCond{{ft_verifier_bit(generator, round)}, false}, 1});

  c.steps.push_back({{GateOp::unitary2(a1, supp[0], cx), GateOp::unitary2(a2, supp[1], cx),
                      GateOp::unitary2(a3, supp[2], cx), GateOp::unitary2(a4, supp[3], cx)}});
  c.steps.push_back({{GateOp::unitary1(a1, h), GateOp::unitary1(a2, h), GateOp::unitary1(a3, h),
                      GateOp::unitary1(a4, h)}});
  // fold the X-basis parity of the cat into a1
  c.steps.push_back({{GateOp::unitary2(a2, a1, cx), GateOp::unitary2(a4, a3, cx)}});
  c.steps.push_back({{GateOp::unitary2(a3, a1, cx)}});
  c.steps.push_back({{GateOp::measure(a1, ft_syndrome_bit(generator, round))}});
  return {first, static_cast<int>(c.steps.size()) - 1};
}

}  // namespace

Circuit ft_circuit(RepetitionPolicy policy) {
  if (policy.base_rounds != 2)
    throw std::invalid_argument("ft_circuit: only the two-round base policy is supported");
  Circuit c;
  c.num_qubits = kFtQubits;
  c.classical_bits = kFtClassicalBits;
  for (int g = 0; g < 3; ++g) {
    append_round(c, g, 0);
    const auto [first, last] = append_round(c, g, 1);
    if (policy.extra_round_on_disagreement) {
      // Third round iff the two syndrome bits disagree; it overwrites the
      // round-1 slot, so the final slot value is the majority.
      c.retry_blocks.push_back(
          {first, last, ParityCond{{ft_syndrome_bit(g, 0), ft_syndrome_bit(g, 1)}, false}, 1});
    }
  }
  const int a1 = 7, a2 = 8, a3 = 9, a4 = 10, v = kVerifierQubit;
  c.steps.push_back({{GateOp::reset(a1), GateOp::reset(a2), GateOp::reset(a3), GateOp::reset(a4),
                      GateOp::reset(v)}});
  const auto cq = correction_qubits();
  TimeStep corrections;
  for (int g = 0; g < 3; ++g)
    corrections.ops.push_back(GateOp::controlled_pauli(cq[static_cast<std::size_t>(g)], PauliError::kZ,
                                                       ParityCond{{ft_syndrome_bit(g, 1)}, false}));
  c.steps.push_back(std::move(corrections));
  return c;
}

const std::vector<SupportState>& correctable_states() {
  static const std::vector<SupportState> states = [] {
    std::vector<SupportState> out;
    const auto& strings = codeword_basis_states(Codeword::kZeroL);
    std::vector<std::uint32_t> x_masks = {0};
    std::vector<std::uint32_t> z_masks = {0};
    for (int q = 0; q < kDataQubits; ++q) {
      x_masks.push_back(1u << (kDataQubits - 1 - q));
      z_masks.push_back(1u << (kDataQubits - 1 - q));
    }
    for (std::uint32_t x : x_masks)
      for (std::uint32_t z : z_masks) {
        SupportState s;
        s.reserve(8);
        for (std::uint32_t str : strings) {
          const double sign = (std::popcount(str & z) % 2 == 0) ? 1.0 : -1.0;
          s.emplace_back(str ^ x, sign);
        }
        out.push_back(std::move(s));
      }
    return out;
  }();
  return states;
}

double success_probability(const DensityMatrix& data_state) {
  if (data_state.num_qubits() != kDataQubits)
    throw std::invalid_argument("success_probability: expected a 7-qubit state");
  if (std::abs(data_state.trace() - 1.0) > 1e-6)
    throw std::invalid_argument("success_probability: expected unit trace");
  double total = 0;
  for (const SupportState& s : correctable_states()) {
    Amp acc{};
    for (const auto& [ia, ca] : s)
      for (const auto& [ib, cb] : s) acc += ca * cb * data_state.element(ia, ib);
    total += acc.real() / 8.0;  // amplitudes carry a 1/sqrt(8) each
  }
  return total;
}

double fidelity(const DensityMatrix& data_state) {
  const double s = success_probability(data_state);
  return s * s;
}

void apply_syndrome_correction(DensityMatrix& state, const std::array<int, 3>& syndrome) {
  const auto cq = correction_qubits();
  for (int g = 0; g < 3; ++g)
    if (syndrome[static_cast<std::size_t>(g)]) state.apply_one_qubit(cq[static_cast<std::size_t>(g)], gates::pauli_z());
}

int majority(std::span<const int> outcomes) {
  if (outcomes.size() == 2) {
    if (outcomes[0] != outcomes[1])
      throw std::invalid_argument("majority: disagreeing pair needs a third outcome");
    return outcomes[0];
  }
  if (outcomes.size() == 3) return (outcomes[0] + outcomes[1] + outcomes[2]) >= 2 ? 1 : 0;
  throw std::invalid_argument("majority: expected 2 or 3 outcomes");
}

}  // namespace ftprep::steane
