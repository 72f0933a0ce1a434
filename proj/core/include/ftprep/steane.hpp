// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <span>
#include <utility>
#include <vector>

#include "ftprep/circuit.hpp"
#include "ftprep/density_matrix.hpp"

namespace ftprep::steane {

inline constexpr int kDataQubits = 7;
inline constexpr int kCatQubits = 4;
inline constexpr int kFtQubits = 12;  // 7 data + 4 cat + 1 verifier
inline constexpr int kVerifierQubit = 11;
inline constexpr int kFtClassicalBits = 12;

enum class Codeword { kZeroL, kOneL };

// Basis indices of the eight-string superposition (qubit 0 is the most
// significant bit, matching left-to-right ket notation).
const std::array<std::uint32_t, 8>& codeword_basis_states(Codeword w);

// X-type generator masks over the 7 data qubits; the Z-type generators use
// the same three masks.
std::array<std::uint32_t, 3> x_generator_masks();
std::array<std::array<int, 4>, 3> generator_supports();

DensityMatrix codeword_state(Codeword w, Backend backend = Backend::kSparse, SparseOptions opts = {});

// Depth-3, 9-gate encoder: H+CNOT fan-out from the three pivot qubits.
Circuit direct_circuit();

struct RepetitionPolicy {
  int base_rounds = 2;
  bool extra_round_on_disagreement = true;
};

// Shor-ancilla measurement of the three X-type generators on raw |0>^7:
// verified 4-qubit cat per round, syndrome parity folded into one ancilla
// measurement, each generator measured twice with a third round on
// disagreement, Z corrections applied once at the end.
Circuit ft_circuit(RepetitionPolicy policy = {});

int ft_verifier_bit(int generator, int round);
int ft_syndrome_bit(int generator, int round);
std::array<int, 3> correction_qubits();  // one per generator, in exactly its support

// The 64 pure states {E |0_L>} for E in {I} u {X_j} u {Z_j} u {X_j Z_k},
// stored as 8-term support lists (basis index, signed amplitude * sqrt(8)).
using SupportState = std::vector<std::pair<std::uint32_t, double>>;
const std::vector<SupportState>& correctable_states();

// S = sum_i tr(rho rho_i) over the correctable set; expects a 7-qubit state
// of unit trace.
double success_probability(const DensityMatrix& data_state);
// |S|^2.
double fidelity(const DensityMatrix& data_state);

// Z on correction_qubits()[i] for every set syndrome bit i.
void apply_syndrome_correction(DensityMatrix& state, const std::array<int, 3>& syndrome);

// Majority of 2 agreeing or 3 outcomes; throws on a disagreeing pair.
int majority(std::span<const int> outcomes);

}  // namespace ftprep::steane
