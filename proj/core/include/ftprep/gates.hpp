// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "ftprep/types.hpp"

namespace ftprep::gates {

inline Mat2 identity2() { return Mat2{{Amp{1}, Amp{0}, Amp{0}, Amp{1}}}; }
inline Mat2 pauli_x() { return Mat2{{Amp{0}, Amp{1}, Amp{1}, Amp{0}}}; }
inline Mat2 pauli_y() { return Mat2{{Amp{0}, Amp{0, -1}, Amp{0, 1}, Amp{0}}}; }
inline Mat2 pauli_z() { return Mat2{{Amp{1}, Amp{0}, Amp{0}, Amp{-1}}}; }
inline Mat2 xz() { return pauli_x() * pauli_z(); }

inline Mat2 hadamard() {
  const double s = 1.0 / std::sqrt(2.0);
  return Mat2{{Amp{s}, Amp{s}, Amp{s}, Amp{-s}}};
}

inline Mat4 identity4() {
  Mat4 m;
  for (int i = 0; i < 4; ++i) m(i, i) = 1;
  return m;
}

// Control is the first operand qubit (the more significant local bit).
inline Mat4 cnot() {
  Mat4 m;
  m(0, 0) = 1;
  m(1, 1) = 1;
  m(2, 3) = 1;
  m(3, 2) = 1;
  return m;
}

// H on the first operand followed by CNOT(first -> second), compounded into
// a single two-qubit gate.
inline Mat4 h_then_cnot() { return cnot() * kron(hadamard(), identity2()); }

}  // namespace ftprep::gates
