// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "ftprep/noise.hpp"
#include "ftprep/types.hpp"

namespace ftprep {

// Parity condition over classical bits: true iff XOR of the listed bits
// (XORed with `negate`) is 1. Every classical predicate the constructions
// need — verification guards, round-disagreement guards, syndrome-driven
// corrections — is a parity form.
struct ParityCond {
  std::vector<int> bits;
  bool negate = false;

  bool eval(std::span<const std::uint8_t> record) const {
    int v = negate ? 1 : 0;
    for (int b : bits) v ^= record[static_cast<std::size_t>(b)];
    return v != 0;
  }
  bool operator==(const ParityCond&) const = default;
};

struct GateOp {
  enum class Kind { kUnitary1, kUnitary2, kMeasure, kReset, kControlledPauli };

  Kind kind;
  std::array<int, 2> targets{-1, -1};
  Mat2 u2;            // kUnitary1
  Mat4 u4;            // kUnitary2
  int bit = -1;       // kMeasure
  PauliError pauli = PauliError::kX;  // kControlledPauli
  ParityCond cond;    // kControlledPauli

  static GateOp unitary1(int target, const Mat2& u);
  static GateOp unitary2(int a, int b, const Mat4& u);
  static GateOp measure(int target, int bit);
  static GateOp reset(int target);
  static GateOp controlled_pauli(int target, PauliError pauli, ParityCond cond);

  int num_targets() const { return kind == Kind::kUnitary2 ? 2 : 1; }
  bool operator==(const GateOp&) const = default;
};

// Gates within one step act on pairwise disjoint qubits and are applied in
// the same noise interval.
struct TimeStep {
  std::vector<GateOp> ops;
  bool operator==(const TimeStep&) const = default;
};

// A span of steps re-executed (up to max_retries extra passes) whenever the
// guard evaluates true once execution passes last_step.
struct RetryBlock {
  int first_step = 0;
  int last_step = 0;
  ParityCond guard;
  int max_retries = 1;
  bool operator==(const RetryBlock&) const = default;
};

struct Circuit {
  int num_qubits = 0;
  int classical_bits = 0;
  std::vector<TimeStep> steps;
  std::vector<RetryBlock> retry_blocks;
  bool operator==(const Circuit&) const = default;
};

// depth counts each step once (retry blocks at their minimum execution
// count); gate_ops counts every GateOp, measurements and resets included.
struct CircuitStats {
  int qubits = 0;
  int depth = 0;
  int area = 0;
  int gate_ops = 0;
  bool operator==(const CircuitStats&) const = default;
};

CircuitStats stats(const Circuit& c);

// All disjointness, classical-bit-ordering, and width violations; empty for
// a well-formed circuit.
std::vector<std::string> validate(const Circuit& c);

std::string circuit_to_json(const Circuit& c);
Circuit circuit_from_json(const std::string& text);
void save_circuit(const Circuit& c, const std::string& path);
Circuit load_circuit(const std::string& path);

}  // namespace ftprep
