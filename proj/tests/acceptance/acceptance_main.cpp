// SPDX-License-Identifier: Apache-2.0
//
// End-to-end acceptance suite. Each criterion prints one PASS/FAIL line with
// its measured values; the process exits nonzero if any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "ftprep/analysis.hpp"
#include "../test_support.hpp"

using namespace ftprep;
using namespace ftprep::testing;
using Clock = std::chrono::steady_clock;

namespace {

int g_failures = 0;
double g_max_trace_drift = 0;

void report(int id, const char* title, bool pass, const std::string& detail) {
  std::printf("%-4s criterion %d: %s — %s\n", pass ? "PASS" : "FAIL", id, title, detail.c_str());
  std::fflush(stdout);
  if (!pass) ++g_failures;
}

std::string fmt(const char* f, ...) {
  char buf[512];
  va_list args;
  va_start(args, f);
  std::vsnprintf(buf, sizeof(buf), f, args);
  va_end(args);
  return buf;
}

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

int hw_jobs() { return std::max(1u, std::thread::hardware_concurrency()); }

ScenarioScorer drift_tracking_scorer() {
  return steane_scorer();
}

// ---------------------------------------------------------------------------

void criterion_1_exact_encoding() {
  const auto target = steane::codeword_state(steane::Codeword::kZeroL);

  const auto t0 = Clock::now();
  const RunResult direct =
      run_circuit(steane::direct_circuit(), DensityMatrix::basis_state(7, "0000000"), NoiseModel{0}, "");
  const double direct_secs = seconds_since(t0);
  const double direct_overlap = direct.state.overlap(target);
  g_max_trace_drift = std::max(g_max_trace_drift, direct.max_trace_drift);

  const auto t1 = Clock::now();
  EnumerateOptions eo;
  eo.mass_target = 1.0;
  eo.keep_trace = true;
  const AggregateResult ft = enumerate_scenarios(
      steane::ft_circuit(), DensityMatrix::basis_state(12, std::string(12, '0')), NoiseModel{0},
      drift_tracking_scorer(), eo);
  const double ft_secs = seconds_since(t1);
  g_max_trace_drift = std::max(g_max_trace_drift, ft.max_trace_drift);
  // The scorer squares the summed overlap; every scenario must hit 1 exactly,
  // so the aggregated fidelity doubles as the overlap check.
  double min_branch_fid = 1.0;
  for (const auto& s : ft.trace) min_branch_fid = std::min(min_branch_fid, s.fidelity);

  const bool pass = std::abs(direct_overlap - 1.0) <= 1e-10 && std::abs(ft.weighted_fidelity - 1.0) <= 1e-10 &&
                    std::abs(min_branch_fid - 1.0) <= 1e-10 && std::abs(ft.explored_mass - 1.0) <= 1e-10 &&
                    direct_secs < 1.0 && ft_secs < 60.0;
  report(1, "noiseless encoders produce the exact codeword", pass,
         fmt("direct overlap=%.12f (%.3fs), ft weighted fidelity=%.12f over %zu scenarios (%.3fs)",
             direct_overlap, direct_secs, ft.weighted_fidelity, ft.scenarios_explored, ft_secs));
}

void criterion_2_resource_counts() {
  const CircuitStats d = stats(steane::direct_circuit());
  const CircuitStats f = stats(steane::ft_circuit());
  const bool pass = d == CircuitStats{7, 3, 21, 9} && f.qubits == 12 && f.depth >= 60 && f.area >= 720 &&
                    f.gate_ops >= 108;
  report(2, "resource counts match the reference table", pass,
         fmt("direct={%d,%d,%d,%d}, ft={%d,%d,%d,%d}", d.qubits, d.depth, d.area, d.gate_ops, f.qubits,
             f.depth, f.area, f.gate_ops));
}

int criterion_3_first_order_direct() {
  const Config cfg = Config::defaults();
  const Circuit direct = steane::direct_circuit();
  const InjectionReport inj = inject_single(direct, "direct", cfg);
  const int k = inj.failing_count;

  auto direct_success = [&](double p) {
    const RunResult r = run_circuit(direct, DensityMatrix::basis_state(7, "0000000"), NoiseModel{p}, "");
    g_max_trace_drift = std::max(g_max_trace_drift, r.max_trace_drift);
    return steane::success_probability(r.state);
  };
  const double p = 1e-4;
  const double s = direct_success(p);
  const double f_measured = s * s;
  const double f_predicted = 1.0 - (2.0 * k / 3.0) * p;
  const double delta = std::abs(f_measured - f_predicted);

  // independent consistency: sweep-measured slope of 1 - S vs k/3
  const double p_small = 1e-5;
  const double slope = (1.0 - direct_success(p_small)) / p_small;
  const double slope_rel = std::abs(slope - k / 3.0) / (k / 3.0);

  const bool pass = delta <= 1e-6 && k == 6 && slope_rel <= 0.02;
  report(3, "direct fidelity is 1 - (2k/3)p at first order", pass,
         fmt("k=%d (target 6), |F(1e-4) - (1-4p)|=%.3e (tol 1e-6), slope/k-consistency=%.3f%%", k, delta,
             100 * slope_rel));
  return k;
}

struct FitOutcome {
  FitResult fit;
  std::vector<SweepPoint> points;
};

FitOutcome criterion_4_quadratic_fit() {
  Config cfg = Config::defaults();
  cfg.p_grid = {1e-6, 3.1622776601683795e-6, 1e-5, 3.1622776601683795e-5, 1e-4};
  const Circuit direct = steane::direct_circuit();
  const Circuit ft = steane::ft_circuit();
  const auto points = run_sweep(direct, ft, cfg.p_grid, cfg, hw_jobs());
  const FitResult fit = fit_quadratic_failure(points, FitWindow{1e-6, 1e-4}, 0.05);
  const double ref = 7.7e4;
  const double factor = fit.c_fidelity > ref ? fit.c_fidelity / ref : ref / fit.c_fidelity;
  const bool in_range = fit.c_fidelity >= 2e4 && fit.c_fidelity <= 2.6e5;
  const bool pass = fit.max_rel_residual_fidelity < 0.05 && in_range && factor <= 3.0;
  report(4, "fault-tolerant failure scales as c p^2 in the fit window", pass,
         fmt("c_fidelity=%.4g (range [2e4, 2.6e5], %.2fx of 7.7e4), c_success=%.4g, max residual=%.2f%%",
             fit.c_fidelity, factor, fit.c_success, 100 * fit.max_rel_residual_fidelity));
  return {fit, points};
}

void criterion_5_crossover(const FitResult& fit, int k_direct) {
  Config cfg = Config::defaults();
  cfg.p_grid = {1e-5, 2e-5, 4e-5, 8e-5, 1.4e-4, 2e-4};
  const Circuit direct = steane::direct_circuit();
  const Circuit ft = steane::ft_circuit();
  const auto bracket_points = run_sweep(direct, ft, cfg.p_grid, cfg, hw_jobs());
  const PointEvaluator eval = [&](double p) { return evaluate_point(direct, ft, p, cfg); };
  const CrossoverEstimate est =
      find_crossover(bracket_points, eval, fit, k_direct, stats(ft).area);
  const double closed_rel =
      est.p_cr > 0 ? std::abs(est.closed_form_p_cr - est.p_cr) / est.p_cr : 1.0;
  const double squaring_rel =
      est.p_cr > 0 ? std::abs(est.p_cr_unsquared - est.p_cr) / est.p_cr : 1.0;
  const bool pass = est.bracketed && est.p_cr >= 1e-5 && est.p_cr <= 2e-4 && closed_rel <= 0.10 &&
                    squaring_rel <= 0.10;
  report(5, "crossover bracketed with closed-form consistency", pass,
         fmt("p_cr=%.4g (reference 5.3e-5), closed form 2k/(3c)=%.4g (%.1f%% apart), unsquared root=%.4g, "
             "naive_c=%lld",
             est.p_cr, est.closed_form_p_cr, 100 * closed_rel, est.p_cr_unsquared, est.naive_c));
}

void criterion_6_backend_equivalence() {
  std::mt19937_64 rng(424242);
  double worst = 0;
  int checked = 0;
  for (int trial = 0; trial < 500; ++trial) {
    const int n = 2 + static_cast<int>(rng() % 5);
    const int ops = 10 + static_cast<int>(rng() % 91);  // up to 100
    const auto prog = random_program(rng, n, ops);
    const std::string zeros(static_cast<std::size_t>(n), '0');
    auto dense = DensityMatrix::basis_state(n, zeros, Backend::kDense);
    auto sparse = DensityMatrix::basis_state(n, zeros, Backend::kSparse);
    for (const auto& op : prog) {
      const int outcome = apply_program_op(dense, op);
      apply_program_op(sparse, op, outcome);
    }
    worst = std::max(worst, DensityMatrix::max_abs_diff(sparse, dense));
    ++checked;
  }
  const bool pass = worst < 1e-10 && checked == 500;
  report(6, "sparse and dense backends agree on 500 random programs", pass,
         fmt("max element difference %.3e over %d programs (tol 1e-10)", worst, checked));
}

void criterion_7_channel_and_trace() {
  bool diag_ok = true;
  std::string diag_detail;
  for (double p : {0.0, 0.3, 0.75}) {
    auto dm = DensityMatrix::basis_state(1, "0");
    dm.apply_channel(0, depolarizing_channel(p));
    const double d0 = dm.element(0, 0).real();
    const double d1 = dm.element(1, 1).real();
    if (std::abs(d0 - (1.0 - 2.0 * p / 3.0)) > 1e-12 || std::abs(d1 - 2.0 * p / 3.0) > 1e-12)
      diag_ok = false;
  }
  const bool pass = diag_ok && g_max_trace_drift <= 1e-12;
  report(7, "channel diagonals exact and trace preserved across all runs", pass,
         fmt("max per-step trace drift over acceptance runs %.3e (tol 1e-12), diagonals %s",
             g_max_trace_drift, diag_ok ? "exact" : "WRONG"));
}

void criterion_8_correctable_set() {
  const auto& states = steane::correctable_states();
  double max_cross = 0, min_self = 1;
  for (std::size_t i = 0; i < states.size(); ++i)
    for (std::size_t j = 0; j < states.size(); ++j) {
      Amp inner{};
      for (const auto& [ia, ca] : states[i])
        for (const auto& [ib, cb] : states[j])
          if (ia == ib) inner += ca * cb / 8.0;
      if (i == j)
        min_self = std::min(min_self, std::abs(inner));
      else
        max_cross = std::max(max_cross, std::abs(inner));
    }

  const double s_zero = steane::success_probability(steane::codeword_state(steane::Codeword::kZeroL));

  // X1 X2 corruption, with a brute-force overlap oracle built from scratch
  std::vector<std::pair<std::uint64_t, Amp>> amps;
  for (std::uint32_t s : steane::codeword_basis_states(steane::Codeword::kZeroL))
    amps.emplace_back(s ^ 0b1100000u, Amp{1.0 / std::sqrt(8.0)});
  const auto corrupted = DensityMatrix::from_state_vector(7, amps);
  const double s_bad = steane::success_probability(corrupted);
  double oracle_sum = 0;
  for (const auto& st : steane::correctable_states()) {
    Amp acc{};
    for (const auto& [ia, ca] : st)
      for (const auto& [ib, cb] : st) acc += ca * cb * corrupted.element(ia, ib) / 8.0;
    oracle_sum += acc.real();
  }

  const bool pass = states.size() == 64 && max_cross <= 1e-12 && std::abs(min_self - 1.0) <= 1e-12 &&
                    std::abs(s_zero - 1.0) <= 1e-9 && std::abs(s_bad) <= 1e-9 &&
                    std::abs(oracle_sum - s_bad) <= 1e-12;
  report(8, "correctable set: 64 orthogonal states with the right membership", pass,
         fmt("size=%zu, max cross overlap=%.2e, S(|0_L>)=%.12f, S(X1X2|0_L>)=%.2e (oracle %.2e)",
             states.size(), max_cross, s_zero, s_bad, oracle_sum));
}

void criterion_9_scenario_completeness() {
  // 6-measurement toy circuit: H-then-measure rounds on two qubits
  Circuit c;
  c.num_qubits = 2;
  c.classical_bits = 6;
  int bit = 0;
  for (int round = 0; round < 3; ++round) {
    c.steps.push_back(
        {{GateOp::unitary1(0, gates::hadamard()), GateOp::unitary1(1, gates::hadamard())}});
    c.steps.push_back({{GateOp::measure(0, bit++)}});
    c.steps.push_back({{GateOp::measure(1, bit++)}});
  }
  EnumerateOptions eo;
  eo.mass_target = 1.0;
  eo.keep_trace = true;
  const AggregateResult agg = enumerate_scenarios(
      c, DensityMatrix::basis_state(2, "00"), NoiseModel{0},
      [](const DensityMatrix&) { return ScenarioScore{1.0, 1.0}; }, eo);
  g_max_trace_drift = std::max(g_max_trace_drift, agg.max_trace_drift);
  bool ordered = true;
  for (std::size_t i = 1; i < agg.trace.size(); ++i)
    if (agg.trace[i].probability > agg.trace[i - 1].probability + 1e-12) ordered = false;
  const bool pass = std::abs(agg.explored_mass - 1.0) <= 1e-9 && ordered && agg.scenarios_explored == 64;
  report(9, "exhaustive scenario enumeration is complete and best-first", pass,
         fmt("mass=%.12f over %zu scenarios, ordering %s", agg.explored_mass, agg.scenarios_explored,
             ordered ? "non-increasing" : "VIOLATED"));
}

}  // namespace

int main() {
  const auto t0 = Clock::now();
  criterion_1_exact_encoding();
  criterion_2_resource_counts();
  const int k = criterion_3_first_order_direct();
  const FitOutcome fit = criterion_4_quadratic_fit();
  criterion_5_crossover(fit.fit, k);
  criterion_6_backend_equivalence();
  criterion_7_channel_and_trace();
  criterion_8_correctable_set();
  criterion_9_scenario_completeness();
  std::printf("%d of 9 criteria passed in %.1fs\n", 9 - g_failures, seconds_since(t0));
  return g_failures == 0 ? 0 : 1;
}
