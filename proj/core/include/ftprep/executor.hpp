// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

#include "ftprep/circuit.hpp"
#include "ftprep/density_matrix.hpp"
#include "ftprep/noise.hpp"

namespace ftprep {

// Deterministic Pauli inserted after a time step completes (fires only on the
// first execution of that step if the step lies inside a retried span).
struct Injection {
  int after_step = 0;
  int qubit = 0;
  PauliError pauli = PauliError::kX;
};

struct ExecOptions {
  double outcome_floor = kDefaultOutcomeFloor;
  std::vector<Injection> injections;
};

struct ScenarioExhausted : std::runtime_error {
  ScenarioExhausted() : std::runtime_error("scenario string exhausted before circuit end") {}
};

// Steps a circuit over a density matrix, applying the depolarizing channel to
// every qubit after every time step and pausing at each measurement so the
// caller can force an outcome. Copyable, so scenario enumeration can branch.
class CircuitExecutor {
 public:
  enum class Phase { kNeedOutcome, kDone };

  CircuitExecutor(const Circuit& circuit, DensityMatrix init, NoiseModel model, ExecOptions opts = {});

  // Runs until the next measurement or completion.
  Phase advance();
  bool done() const { return done_; }

  int pending_qubit() const;
  int pending_bit() const;
  double outcome_probability(int outcome) const;
  // Forces the pending outcome, renormalizes, folds its probability into the
  // path probability. Throws ImpossibleBranch below the configured floor.
  void supply_outcome(int outcome);

  const DensityMatrix& state() const { return state_; }
  DensityMatrix take_state() && { return std::move(state_); }
  double path_probability() const { return prob_; }
  const std::vector<std::uint8_t>& bits() const { return bits_; }
  const std::string& digits() const { return digits_; }
  double max_trace_drift() const { return max_trace_drift_; }

 private:
  void end_of_step();

  const Circuit* circuit_;
  DensityMatrix state_;
  NoiseModel model_;
  ExecOptions opts_;
  KrausChannel noise_channel_;

  int pc_ = 0;
  std::size_t op_idx_ = 0;
  bool pending_ = false;
  bool done_ = false;
  std::vector<int> retries_left_;
  std::vector<std::uint8_t> bits_;
  std::string digits_;
  std::vector<bool> injection_fired_;
  double prob_ = 1.0;
  double max_trace_drift_ = 0.0;
};

struct RunResult {
  DensityMatrix state;
  double probability = 1.0;
  std::vector<std::uint8_t> bits;
  std::string digits;
  double max_trace_drift = 0.0;
};

// Runs the whole circuit with measurement outcomes forced from `scenario`
// (one binary digit per executed measurement). Throws ScenarioExhausted if
// the string runs out and ImpossibleBranch on a negligible-probability digit.
RunResult run_circuit(const Circuit& circuit, const DensityMatrix& init, NoiseModel model,
                      std::string_view scenario, ExecOptions opts = {});

}  // namespace ftprep
