// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ftprep/scenario.hpp"
#include "ftprep/steane.hpp"

namespace ftprep {

struct Config {
  std::vector<double> p_grid;  // defaults to 12 log-spaced points in [1e-6, 1e-2]
  double mass_target = 1.0 - 1e-9;
  std::size_t max_scenarios = 1'000'000;
  std::uint32_t leaf_size = 4;
  double prune_tol = kDefaultPruneTol;
  Backend backend = Backend::kSparse;
  bool seedless = true;  // documentation of determinism; must stay true
  // When set, sweep points tighten each point's mass target only until the
  // residual half-width is far below the measured failure deficit.
  bool adaptive_mass = true;

  SparseOptions sparse() const { return SparseOptions{leaf_size, prune_tol}; }
  static Config defaults();
  static Config from_json(const std::string& text);
  static Config from_file(const std::string& path);
  std::string to_json() const;
};

// Success classified against the correctable set after one deterministic
// Pauli injection, for every (time step, qubit, Pauli) location.
struct InjectionRecord {
  int step = 0;  // injected after this step (0-based)
  int qubit = 0;
  PauliError pauli = PauliError::kX;
  double success = 0.0;
};

struct InjectionReport {
  std::string circuit_name;
  int qubits = 0;
  int depth = 0;
  std::vector<InjectionRecord> records;
  int failing_count = 0;
};

ScenarioScorer steane_scorer();

InjectionReport inject_single(const Circuit& circuit, const std::string& name, const Config& cfg);

struct SweepPoint {
  double p = 0.0;
  double f_direct = 0.0;
  double f_ft = 0.0;
  double f_ft_err = 0.0;
  double s_direct = 0.0;
  double s_ft = 0.0;
  double s_ft_err = 0.0;
  double ft_mass = 0.0;
  double ft_scenarios = 0.0;
  double ft_capped = 0.0;
};

SweepPoint evaluate_point(const Circuit& direct, const Circuit& ft, double p, const Config& cfg);
std::vector<SweepPoint> run_sweep(const Circuit& direct, const Circuit& ft,
                                  std::span<const double> p_values, const Config& cfg, int jobs = 1);

struct FitWindow {
  double p_min = 1e-6;
  double p_max = 1e-4;
};

struct FitResult {
  double c_success = 0.0;   // least squares of 1 - S_ft against c p^2
  double c_fidelity = 0.0;  // least squares of 1 - F_ft against c p^2
  double max_rel_residual_success = 0.0;
  double max_rel_residual_fidelity = 0.0;
  int points_used = 0;
  bool well_conditioned = false;
};

FitResult fit_quadratic_failure(std::span<const SweepPoint> sweep, FitWindow window = {},
                                double residual_tol = 0.05);

struct CrossoverEstimate {
  bool bracketed = false;
  double p_cr = 0.0;            // root of F_ft(p) - F_direct(p)
  double p_cr_unsquared = 0.0;  // root of S_ft(p) - S_direct(p)
  double c_fit = 0.0;           // fidelity-convention quadratic coefficient
  double c_fit_success = 0.0;
  int k_direct = 0;
  long long naive_c = 0;  // C(area_ft, 2)
  double closed_form_p_cr = 0.0;  // 2k / (3 c_fit)
};

using PointEvaluator = std::function<SweepPoint(double)>;

CrossoverEstimate find_crossover(std::span<const SweepPoint> sweep, const PointEvaluator& eval,
                                 const FitResult& fit, int k_direct, int ft_area);

// CSV / report I/O ----------------------------------------------------------

// Header `p,f_direct,f_ft,f_ft_err`, 17 significant digits.
void write_sweep_csv(std::ostream& os, std::span<const SweepPoint> points);
// All SweepPoint fields, for lossless round trips between subcommands.
void write_sweep_detail_csv(std::ostream& os, std::span<const SweepPoint> points);
std::vector<SweepPoint> read_sweep_csv(std::istream& is);
std::vector<SweepPoint> read_sweep_detail_csv(std::istream& is);

// Header `step,qubit,pauli,success` (step and qubit reported 1-based).
void write_injection_csv(std::ostream& os, const InjectionReport& report);

std::string crossover_report_json(const CrossoverEstimate& est, const FitResult& fit);

long long pair_count(long long area);

}  // namespace ftprep
