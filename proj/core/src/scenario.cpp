// SPDX-License-Identifier: Apache-2.0
#include "ftprep/scenario.hpp"

#include <algorithm>
#include <cstdio>
#include <ostream>

namespace ftprep {

ScenarioEnumerator::ScenarioEnumerator(const Circuit& circuit, DensityMatrix init, NoiseModel model,
                                       ScenarioScorer scorer, EnumerateOptions opts)
    : circuit_(&circuit),
      init_(std::move(init)),
      model_(model),
      scorer_(std::move(scorer)),
      opts_(std::move(opts)) {
  ExecOptions eo{opts_.outcome_floor, opts_.injections};
  CircuitExecutor root(*circuit_, init_, model_, eo);
  Item item{1.0, next_seq_++, std::string{}, std::move(root), 0};
  push_item(std::move(item));
}

void ScenarioEnumerator::push_item(Item item) {
  if (item.exec) {
    const std::size_t b = item.exec->state().approx_bytes();
    if (checkpoint_bytes_ + b <= opts_.checkpoint_budget_bytes) {
      item.bytes = b;
      checkpoint_bytes_ += b;
    } else {
      item.exec.reset();
      item.bytes = 0;
    }
  }
  frontier_.push_back(std::move(item));
  std::push_heap(frontier_.begin(), frontier_.end(), ItemOrder{});
}

ScenarioEnumerator::Item ScenarioEnumerator::pop_item() {
  std::pop_heap(frontier_.begin(), frontier_.end(), ItemOrder{});
  Item item = std::move(frontier_.back());
  frontier_.pop_back();
  checkpoint_bytes_ -= item.bytes;
  item.bytes = 0;
  return item;
}

CircuitExecutor ScenarioEnumerator::materialize(Item& item) {
  if (item.exec) {
    CircuitExecutor ex = std::move(*item.exec);
    item.exec.reset();
    return ex;
  }
  ExecOptions eo{opts_.outcome_floor, opts_.injections};
  CircuitExecutor ex(*circuit_, init_, model_, eo);
  for (char d : item.digits) {
    if (ex.advance() != CircuitExecutor::Phase::kNeedOutcome)
      throw std::logic_error("ScenarioEnumerator: replay diverged from recorded digits");
    ex.supply_outcome(d - '0');
  }
  return ex;
}

const AggregateResult& ScenarioEnumerator::extend(double mass_target, std::size_t max_scenarios) {
  if (mass_target <= 0 || mass_target > 1.0)
    throw std::invalid_argument("ScenarioEnumerator: mass target must lie in (0, 1]");
  if (max_scenarios < 1) throw std::invalid_argument("ScenarioEnumerator: scenario cap must be >= 1");
  agg_.cap_hit = false;
  while (agg_.explored_mass < mass_target && !frontier_.empty()) {
    if (agg_.scenarios_explored >= max_scenarios) {
      agg_.cap_hit = true;
      break;
    }
    Item item = pop_item();
    CircuitExecutor ex = materialize(item);
    const auto phase = ex.advance();
    agg_.max_trace_drift = std::max(agg_.max_trace_drift, ex.max_trace_drift());
    if (phase == CircuitExecutor::Phase::kDone) {
      const ScenarioScore score = scorer_(ex.state());
      const double p = ex.path_probability();
      agg_.weighted_fidelity += p * score.fidelity;
      agg_.weighted_success += p * score.success;
      agg_.explored_mass += p;
      agg_.scenarios_explored += 1;
      if (opts_.keep_trace) agg_.trace.push_back({ex.digits(), p, score.success, score.fidelity});
      continue;
    }
    // Split on the pending measurement. Children are pushed right after their
    // projection and advance lazily when popped, so branches that never reach
    // the frontier top never simulate their suffix.
    const bool keep0 = ex.outcome_probability(0) >= opts_.outcome_floor;
    const bool keep1 = ex.outcome_probability(1) >= opts_.outcome_floor;
    if (keep0 && keep1) {
      CircuitExecutor child = ex;
      child.supply_outcome(0);
      push_item(Item{child.path_probability(), next_seq_++, child.digits(), std::move(child), 0});
      ex.supply_outcome(1);
      push_item(Item{ex.path_probability(), next_seq_++, ex.digits(), std::move(ex), 0});
    } else if (keep0 || keep1) {
      ex.supply_outcome(keep0 ? 0 : 1);
      push_item(Item{ex.path_probability(), next_seq_++, ex.digits(), std::move(ex), 0});
    }
  }
  return agg_;
}

AggregateResult enumerate_scenarios(const Circuit& circuit, const DensityMatrix& init, NoiseModel model,
                                    ScenarioScorer scorer, EnumerateOptions opts) {
  const double target = opts.mass_target;
  const std::size_t cap = opts.max_scenarios;
  ScenarioEnumerator en(circuit, init, model, std::move(scorer), std::move(opts));
  return en.extend(target, cap);
}

double branch_probability(const Circuit& circuit, const DensityMatrix& init, NoiseModel model,
                          std::string_view prefix, EnumerateOptions opts) {
  ExecOptions eo{opts.outcome_floor, opts.injections};
  CircuitExecutor ex(circuit, init, model, eo);
  try {
    for (char d : prefix) {
      if (ex.advance() != CircuitExecutor::Phase::kNeedOutcome)
        throw std::invalid_argument("branch_probability: prefix longer than the measurement path");
      if (d != '0' && d != '1') throw std::invalid_argument("branch_probability: digits must be 0 or 1");
      ex.supply_outcome(d - '0');
    }
  } catch (const ImpossibleBranch&) {
    return 0.0;
  }
  return ex.path_probability();
}

void write_scenario_trace(std::ostream& os, std::span<const CompletedScenario> scenarios) {
  char buf[96];
  for (const CompletedScenario& s : scenarios) {
    std::snprintf(buf, sizeof(buf), " %.17g %.17g\n", s.probability, s.fidelity);
    os << (s.bits.empty() ? "-" : s.bits) << buf;
  }
}

}  // namespace ftprep
