// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <span>
#include <string>

#include "ftprep/density_matrix.hpp"

namespace ftprep {

// Single-parameter discrete error model: after every time step, every qubit
// suffers X, Y or Z conjugation with probability p/3 each.
struct NoiseModel {
  double p = 0.0;

  void validate() const {
    if (p < 0.0 || p > 1.0) throw std::invalid_argument("NoiseModel: p must lie in [0, 1]");
  }
};

// The discrete injected error set. XZ conjugates identically to Y (the i
// phase cancels against its conjugate).
enum class PauliError { kX, kZ, kXZ };

Mat2 pauli_error_matrix(PauliError e);
std::string pauli_error_name(PauliError e);
PauliError pauli_error_from_name(std::string_view name);

// rho -> (1-p) rho + p/3 (X rho X + Y rho Y + Z rho Z) on one qubit.
KrausChannel depolarizing_channel(double p);

// Applies the depolarizing channel independently to every listed qubit.
void depolarize_step(DensityMatrix& state, const NoiseModel& model, std::span<const int> qubits);
void depolarize_all(DensityMatrix& state, const NoiseModel& model);

// Deterministic Pauli conjugation, used for manual error-injection studies
// at p = 0.
void inject_error(DensityMatrix& state, int qubit, PauliError e);

}  // namespace ftprep
