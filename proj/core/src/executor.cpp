// SPDX-License-Identifier: Apache-2.0
#include "ftprep/executor.hpp"

#include <algorithm>
#include <cmath>

namespace ftprep {

CircuitExecutor::CircuitExecutor(const Circuit& circuit, DensityMatrix init, NoiseModel model,
                                 ExecOptions opts)
    : circuit_(&circuit), state_(std::move(init)), model_(model), opts_(std::move(opts)) {
  model_.validate();
  if (state_.num_qubits() != circuit.num_qubits)
    throw std::invalid_argument("CircuitExecutor: state width does not match circuit width");
  if (model_.p > 0) noise_channel_ = depolarizing_channel(model_.p);
  retries_left_.reserve(circuit.retry_blocks.size());
  for (const RetryBlock& rb : circuit.retry_blocks) retries_left_.push_back(rb.max_retries);
  bits_.assign(static_cast<std::size_t>(std::max(0, circuit.classical_bits)), 0);
  std::size_t max_inj = 0;
  for (const Injection& inj : opts_.injections) {
    if (inj.after_step < 0 || inj.after_step >= static_cast<int>(circuit.steps.size()))
      throw std::invalid_argument("CircuitExecutor: injection after nonexistent step");
    if (inj.qubit < 0 || inj.qubit >= circuit.num_qubits)
      throw std::invalid_argument("CircuitExecutor: injection qubit out of range");
    ++max_inj;
  }
  injection_fired_.assign(max_inj, false);
  done_ = circuit.steps.empty();
}

int CircuitExecutor::pending_qubit() const {
  if (!pending_) throw std::logic_error("CircuitExecutor: no pending measurement");
  return circuit_->steps[static_cast<std::size_t>(pc_)].ops[op_idx_].targets[0];
}

int CircuitExecutor::pending_bit() const {
  if (!pending_) throw std::logic_error("CircuitExecutor: no pending measurement");
  return circuit_->steps[static_cast<std::size_t>(pc_)].ops[op_idx_].bit;
}

double CircuitExecutor::outcome_probability(int outcome) const {
  return state_.outcome_probability(pending_qubit(), outcome);
}

void CircuitExecutor::supply_outcome(int outcome) {
  if (!pending_) throw std::logic_error("CircuitExecutor: no pending measurement");
  if (outcome != 0 && outcome != 1) throw std::invalid_argument("CircuitExecutor: outcome must be 0 or 1");
  const GateOp& op = circuit_->steps[static_cast<std::size_t>(pc_)].ops[op_idx_];
  const double p = state_.measure_forced(op.targets[0], outcome, opts_.outcome_floor);
  prob_ *= p;
  bits_[static_cast<std::size_t>(op.bit)] = static_cast<std::uint8_t>(outcome);
  digits_.push_back(static_cast<char>('0' + outcome));
  pending_ = false;
  ++op_idx_;
}

// Applies injections and noise for the step just finished, then evaluates
// retry guards (innermost block first) and either jumps back or advances.
void CircuitExecutor::end_of_step() {
  for (std::size_t i = 0; i < opts_.injections.size(); ++i) {
    const Injection& inj = opts_.injections[i];
    if (inj.after_step == pc_ && !injection_fired_[i]) {
      state_.apply_one_qubit(inj.qubit, pauli_error_matrix(inj.pauli));
      injection_fired_[i] = true;
    }
  }
  if (model_.p > 0)
    for (int q = 0; q < state_.num_qubits(); ++q) state_.apply_channel(q, noise_channel_);
  max_trace_drift_ = std::max(max_trace_drift_, std::abs(state_.trace() - 1.0));

  std::vector<std::size_t> ending;
  for (std::size_t i = 0; i < circuit_->retry_blocks.size(); ++i)
    if (circuit_->retry_blocks[i].last_step == pc_) ending.push_back(i);
  std::sort(ending.begin(), ending.end(), [&](std::size_t a, std::size_t b) {
    return circuit_->retry_blocks[a].first_step > circuit_->retry_blocks[b].first_step;
  });
  for (std::size_t i : ending) {
    const RetryBlock& rb = circuit_->retry_blocks[i];
    if (retries_left_[i] > 0 && rb.guard.eval(bits_)) {
      --retries_left_[i];
      for (std::size_t j = 0; j < circuit_->retry_blocks.size(); ++j) {
        const RetryBlock& inner = circuit_->retry_blocks[j];
        if (j != i && inner.first_step >= rb.first_step && inner.last_step <= rb.last_step)
          retries_left_[j] = inner.max_retries;
      }
      pc_ = rb.first_step;
      op_idx_ = 0;
      return;
    }
  }
  ++pc_;
  op_idx_ = 0;
}

CircuitExecutor::Phase CircuitExecutor::advance() {
  if (pending_) return Phase::kNeedOutcome;
  while (pc_ < static_cast<int>(circuit_->steps.size())) {
    const TimeStep& step = circuit_->steps[static_cast<std::size_t>(pc_)];
    while (op_idx_ < step.ops.size()) {
      const GateOp& op = step.ops[op_idx_];
      switch (op.kind) {
        case GateOp::Kind::kUnitary1:
          state_.apply_one_qubit(op.targets[0], op.u2);
          break;
        case GateOp::Kind::kUnitary2:
          state_.apply_two_qubit(op.targets[0], op.targets[1], op.u4);
          break;
        case GateOp::Kind::kReset:
          state_.reset_qubit(op.targets[0]);
          break;
        case GateOp::Kind::kControlledPauli:
          if (op.cond.eval(bits_)) state_.apply_one_qubit(op.targets[0], pauli_error_matrix(op.pauli));
          break;
        case GateOp::Kind::kMeasure:
          pending_ = true;
          return Phase::kNeedOutcome;
      }
      ++op_idx_;
    }
    end_of_step();
  }
  done_ = true;
  return Phase::kDone;
}

RunResult run_circuit(const Circuit& circuit, const DensityMatrix& init, NoiseModel model,
                      std::string_view scenario, ExecOptions opts) {
  CircuitExecutor ex(circuit, init, model, std::move(opts));
  std::size_t next_digit = 0;
  while (ex.advance() == CircuitExecutor::Phase::kNeedOutcome) {
    if (next_digit >= scenario.size()) throw ScenarioExhausted();
    const char d = scenario[next_digit++];
    if (d != '0' && d != '1') throw std::invalid_argument("scenario digits must be 0 or 1");
    ex.supply_outcome(d - '0');
  }
  const double prob = ex.path_probability();
  std::vector<std::uint8_t> bits = ex.bits();
  std::string digits = ex.digits();
  const double drift = ex.max_trace_drift();
  return RunResult{std::move(ex).take_state(), prob, std::move(bits), std::move(digits), drift};
}

}  // namespace ftprep
