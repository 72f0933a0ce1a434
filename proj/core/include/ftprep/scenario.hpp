// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ftprep/executor.hpp"

namespace ftprep {

struct ScenarioScore {
  double success = 1.0;
  double fidelity = 1.0;
};

// Scores a completed run's final state; the enumerator is agnostic to the
// figure of merit.
using ScenarioScorer = std::function<ScenarioScore(const DensityMatrix&)>;

struct CompletedScenario {
  std::string bits;
  double probability = 0.0;
  double success = 0.0;
  double fidelity = 0.0;
};

struct AggregateResult {
  double weighted_fidelity = 0.0;
  double weighted_success = 0.0;
  double explored_mass = 0.0;
  std::size_t scenarios_explored = 0;
  bool cap_hit = false;
  double max_trace_drift = 0.0;
  std::vector<CompletedScenario> trace;  // populated when keep_trace is set

  double residual() const { return std::max(0.0, 1.0 - explored_mass); }
  double fidelity_lower() const { return weighted_fidelity; }
  double fidelity_upper() const { return weighted_fidelity + residual(); }
  double fidelity_mid() const { return weighted_fidelity + 0.5 * residual(); }
  double success_lower() const { return weighted_success; }
  double success_upper() const { return weighted_success + residual(); }
  double success_mid() const { return weighted_success + 0.5 * residual(); }
  double half_width() const { return 0.5 * residual(); }
};

struct EnumerateOptions {
  double mass_target = 1.0 - 1e-9;
  std::size_t max_scenarios = 1'000'000;
  double outcome_floor = kDefaultOutcomeFloor;
  std::size_t checkpoint_budget_bytes = std::size_t{512} << 20;
  bool keep_trace = false;
  std::vector<Injection> injections;
};

// Best-first exploration of the measurement-outcome tree: branches pop in
// non-increasing probability order, so completed scenarios accumulate from
// the most likely down until the explored mass reaches the target or the
// scenario cap is hit. Branch states are checkpointed while the memory
// budget lasts; past it, popped branches replay their digit prefix.
class ScenarioEnumerator {
 public:
  ScenarioEnumerator(const Circuit& circuit, DensityMatrix init, NoiseModel model, ScenarioScorer scorer,
                     EnumerateOptions opts = {});

  // Continues exploring until `mass_target`/`max_scenarios`; may be called
  // repeatedly with progressively tighter targets.
  const AggregateResult& extend(double mass_target, std::size_t max_scenarios);
  const AggregateResult& result() const { return agg_; }

 private:
  struct Item {
    double prob;
    std::uint64_t seq;
    std::string digits;
    std::optional<CircuitExecutor> exec;  // positioned after its last digit
    std::size_t bytes = 0;
  };
  struct ItemOrder {
    bool operator()(const Item& a, const Item& b) const {
      if (a.prob != b.prob) return a.prob < b.prob;
      return a.seq > b.seq;  // FIFO among ties
    }
  };

  void push_item(Item item);
  Item pop_item();
  CircuitExecutor materialize(Item& item);

  const Circuit* circuit_;
  DensityMatrix init_;
  NoiseModel model_;
  ScenarioScorer scorer_;
  EnumerateOptions opts_;
  std::vector<Item> frontier_;  // heap ordered by ItemOrder
  AggregateResult agg_;
  std::uint64_t next_seq_ = 0;
  std::size_t checkpoint_bytes_ = 0;
};

AggregateResult enumerate_scenarios(const Circuit& circuit, const DensityMatrix& init, NoiseModel model,
                                    ScenarioScorer scorer, EnumerateOptions opts = {});

// Product of forced-outcome probabilities along a digit prefix; 0 for an
// impossible branch.
double branch_probability(const Circuit& circuit, const DensityMatrix& init, NoiseModel model,
                          std::string_view prefix, EnumerateOptions opts = {});

// One `bits probability fidelity` line per completed scenario, in descending
// probability order.
void write_scenario_trace(std::ostream& os, std::span<const CompletedScenario> scenarios);

}  // namespace ftprep
