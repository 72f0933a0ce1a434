// SPDX-License-Identifier: Apache-2.0
#include "ftprep/noise.hpp"

#include "ftprep/gates.hpp"

namespace ftprep {

Mat2 pauli_error_matrix(PauliError e) {
  switch (e) {
    case PauliError::kX:
      return gates::pauli_x();
    case PauliError::kZ:
      return gates::pauli_z();
    case PauliError::kXZ:
      return gates::xz();
  }
  throw std::logic_error("unreachable");
}

std::string pauli_error_name(PauliError e) {
  switch (e) {
    case PauliError::kX:
      return "X";
    case PauliError::kZ:
      return "Z";
    case PauliError::kXZ:
      return "XZ";
  }
  throw std::logic_error("unreachable");
}

PauliError pauli_error_from_name(std::string_view name) {
  if (name == "X") return PauliError::kX;
  if (name == "Z") return PauliError::kZ;
  if (name == "XZ") return PauliError::kXZ;
  throw std::invalid_argument("unknown Pauli error name: " + std::string(name));
}

KrausChannel depolarizing_channel(double p) {
  if (p < 0.0 || p > 1.0) throw std::invalid_argument("depolarizing_channel: p must lie in [0, 1]");
  return KrausChannel{{{1.0 - p, gates::identity2()},
                       {p / 3.0, gates::pauli_x()},
                       {p / 3.0, gates::pauli_y()},
                       {p / 3.0, gates::pauli_z()}}};
}

void depolarize_step(DensityMatrix& state, const NoiseModel& model, std::span<const int> qubits) {
  model.validate();
  if (model.p == 0.0) return;
  const KrausChannel ch = depolarizing_channel(model.p);
  for (int q : qubits) state.apply_channel(q, ch);
}

void depolarize_all(DensityMatrix& state, const NoiseModel& model) {
  model.validate();
  if (model.p == 0.0) return;
  const KrausChannel ch = depolarizing_channel(model.p);
  for (int q = 0; q < state.num_qubits(); ++q) state.apply_channel(q, ch);
}

void inject_error(DensityMatrix& state, int qubit, PauliError e) {
  state.apply_one_qubit(qubit, pauli_error_matrix(e));
}

}  // namespace ftprep
