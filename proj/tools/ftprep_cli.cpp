// SPDX-License-Identifier: Apache-2.0
//
// Command-line driver: resource statistics, single-error injection studies,
// fidelity sweeps, quadratic-failure fits, and crossover estimation for the
// direct and fault-tolerant logical-zero preparation circuits.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "ftprep/analysis.hpp"

namespace fs = std::filesystem;
using namespace ftprep;

namespace {

struct GlobalArgs {
  std::string config_path;
  std::string circuit_file;
  std::string backend;
  std::string out_dir = ".";
};

Config load_config(const GlobalArgs& g) {
  Config cfg = g.config_path.empty() ? Config::defaults() : Config::from_file(g.config_path);
  if (!g.backend.empty()) {
    if (g.backend == "sparse")
      cfg.backend = Backend::kSparse;
    else if (g.backend == "dense")
      cfg.backend = Backend::kDense;
    else
      throw CLI::ValidationError("--backend must be 'sparse' or 'dense'");
  }
  return cfg;
}

struct NamedCircuit {
  std::string name;
  Circuit circuit;
};

// Returns the circuit selected by --circuit-file (if given) or the builtin
// pair otherwise.
std::vector<NamedCircuit> select_circuits(const GlobalArgs& g, const std::string& which) {
  if (!g.circuit_file.empty()) return {{fs::path(g.circuit_file).stem().string(), load_circuit(g.circuit_file)}};
  std::vector<NamedCircuit> out;
  if (which == "direct" || which == "both") out.push_back({"direct", steane::direct_circuit()});
  if (which == "ft" || which == "both") out.push_back({"ft", steane::ft_circuit()});
  if (out.empty()) throw CLI::ValidationError("--circuit must be 'direct', 'ft' or 'both'");
  return out;
}

std::ofstream open_out(const GlobalArgs& g, const std::string& name) {
  fs::create_directories(g.out_dir);
  const fs::path p = fs::path(g.out_dir) / name;
  std::ofstream f(p);
  if (!f) throw std::runtime_error("cannot open for writing: " + p.string());
  std::cout << "writing " << p.string() << "\n";
  return f;
}

std::vector<SweepPoint> sweep_from_file_or_run(const GlobalArgs&, const Config& cfg,
                                               const std::string& in_path, int jobs) {
  if (!in_path.empty()) {
    std::ifstream f(in_path);
    if (!f) throw std::runtime_error("cannot open: " + in_path);
    return read_sweep_detail_csv(f);
  }
  const Circuit direct = steane::direct_circuit();
  const Circuit ft = steane::ft_circuit();
  return run_sweep(direct, ft, cfg.p_grid, cfg, jobs);
}

int cmd_stats(const GlobalArgs& g) {
  for (const NamedCircuit& nc : select_circuits(g, "both")) {
    const CircuitStats s = stats(nc.circuit);
    const auto violations = validate(nc.circuit);
    std::printf("%-8s qubits=%d depth=%d area=%d gate_ops=%d%s\n", nc.name.c_str(), s.qubits, s.depth,
                s.area, s.gate_ops, violations.empty() ? "" : "  [INVALID]");
    for (const std::string& v : violations) std::printf("  violation: %s\n", v.c_str());
  }
  return 0;
}

int cmd_inject(const GlobalArgs& g, const std::string& which) {
  const Config cfg = load_config(g);
  for (const NamedCircuit& nc : select_circuits(g, which)) {
    const InjectionReport report = inject_single(nc.circuit, nc.name, cfg);
    auto f = open_out(g, "inject_" + nc.name + ".csv");
    write_injection_csv(f, report);
    std::printf("%s: %zu injections, %d failing\n", nc.name.c_str(), report.records.size(),
                report.failing_count);
  }
  return 0;
}

int cmd_sweep(const GlobalArgs& g, int jobs, bool trace) {
  const Config cfg = load_config(g);
  const Circuit direct = steane::direct_circuit();
  const Circuit ft = steane::ft_circuit();
  std::vector<SweepPoint> points = run_sweep(direct, ft, cfg.p_grid, cfg, jobs);
  {
    auto f = open_out(g, "sweep.csv");
    write_sweep_csv(f, points);
  }
  {
    auto f = open_out(g, "sweep_detail.csv");
    write_sweep_detail_csv(f, points);
  }
  if (trace) {
    // per-point scenario traces for the FT circuit
    for (const SweepPoint& pt : points) {
      EnumerateOptions eo;
      eo.mass_target = cfg.mass_target;
      eo.max_scenarios = cfg.max_scenarios;
      eo.keep_trace = true;
      const DensityMatrix init =
          DensityMatrix::basis_state(ft.num_qubits, std::string(static_cast<std::size_t>(ft.num_qubits), '0'),
                                     cfg.backend, cfg.sparse());
      const AggregateResult agg = enumerate_scenarios(ft, init, NoiseModel{pt.p}, steane_scorer(), eo);
      char name[64];
      std::snprintf(name, sizeof(name), "scenarios_p%.3e.txt", pt.p);
      auto f = open_out(g, name);
      write_scenario_trace(f, agg.trace);
    }
  }
  for (const SweepPoint& pt : points)
    std::printf("p=%-12.4e F_direct=%-22.17g F_ft=%-22.17g +/-%.3e (%g scenarios%s)\n", pt.p, pt.f_direct,
                pt.f_ft, pt.f_ft_err, pt.ft_scenarios, pt.ft_capped != 0 ? ", cap hit" : "");
  return 0;
}

int cmd_fit_c(const GlobalArgs& g, const std::string& in_path, double p_min, double p_max, int jobs) {
  Config cfg = load_config(g);
  FitWindow window{p_min, p_max};
  std::vector<SweepPoint> points;
  if (!in_path.empty()) {
    points = sweep_from_file_or_run(g, cfg, in_path, jobs);
  } else {
    cfg.p_grid.clear();
    for (int i = 0; i < 5; ++i)
      cfg.p_grid.push_back(p_min * std::pow(p_max / p_min, i / 4.0));
    points = sweep_from_file_or_run(g, cfg, "", jobs);
  }
  const FitResult fit = fit_quadratic_failure(points, window);
  std::printf("c_success  = %.6g   (fit of 1 - S_ft to c p^2, max rel residual %.3g)\n", fit.c_success,
              fit.max_rel_residual_success);
  std::printf("c_fidelity = %.6g   (fit of 1 - F_ft to c p^2, max rel residual %.3g)\n", fit.c_fidelity,
              fit.max_rel_residual_fidelity);
  std::printf("points_used = %d, well_conditioned = %s\n", fit.points_used,
              fit.well_conditioned ? "true" : "false");
  return fit.well_conditioned ? 0 : 2;
}

int cmd_crossover(const GlobalArgs& g, const std::string& in_path, double p_min, double p_max, int jobs) {
  Config cfg = load_config(g);
  const Circuit direct = steane::direct_circuit();
  const Circuit ft = steane::ft_circuit();

  // fit window sweep (low p) + bracket sweep
  Config fit_cfg = cfg;
  fit_cfg.p_grid.clear();
  for (int i = 0; i < 5; ++i) fit_cfg.p_grid.push_back(1e-6 * std::pow(100.0, i / 4.0));
  std::vector<SweepPoint> fit_points = run_sweep(direct, ft, fit_cfg.p_grid, fit_cfg, jobs);
  const FitResult fit = fit_quadratic_failure(fit_points, FitWindow{1e-6, 1e-4});

  std::vector<SweepPoint> bracket_points;
  if (!in_path.empty()) {
    bracket_points = sweep_from_file_or_run(g, cfg, in_path, jobs);
  } else {
    Config br_cfg = cfg;
    br_cfg.p_grid.clear();
    for (int i = 0; i < 6; ++i) br_cfg.p_grid.push_back(p_min * std::pow(p_max / p_min, i / 5.0));
    bracket_points = run_sweep(direct, ft, br_cfg.p_grid, br_cfg, jobs);
  }

  const InjectionReport inj = inject_single(direct, "direct", cfg);
  const int ft_area = stats(ft).area;
  const PointEvaluator eval = [&](double p) { return evaluate_point(direct, ft, p, cfg); };
  const CrossoverEstimate est = find_crossover(bracket_points, eval, fit, inj.failing_count, ft_area);

  const std::string report = crossover_report_json(est, fit);
  {
    auto f = open_out(g, "crossover.json");
    f << report << '\n';
  }
  std::cout << report << "\n";
  if (!est.bracketed) {
    std::cerr << "no crossover bracket found in the sweep range\n";
    return 2;
  }
  return 0;
}

int cmd_emit(const GlobalArgs& g, const std::string& in_path, int jobs,
             const std::string& codeword_dump) {
  const Config cfg = load_config(g);
  if (!codeword_dump.empty()) {
    const DensityMatrix dm = steane::codeword_state(steane::Codeword::kZeroL, cfg.backend, cfg.sparse());
    auto f = open_out(g, codeword_dump);
    dm.dump_nonzeros(f);
  }
  std::vector<SweepPoint> points = sweep_from_file_or_run(g, cfg, in_path, jobs);
  {
    auto f = open_out(g, "sweep.csv");
    write_sweep_csv(f, points);
  }
  {
    auto f = open_out(g, "sweep_detail.csv");
    write_sweep_detail_csv(f, points);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"density-matrix study of direct vs fault-tolerant logical-zero preparation"};
  app.require_subcommand(1);

  GlobalArgs g;
  app.add_option("--config", g.config_path, "JSON config file");
  app.add_option("--circuit-file", g.circuit_file, "circuit JSON (overrides builtin circuits)");
  app.add_option("--backend", g.backend, "density-matrix backend: sparse|dense");
  app.add_option("--out-dir", g.out_dir, "output directory")->capture_default_str();

  auto* stats_cmd = app.add_subcommand("stats", "print resource statistics");

  std::string inject_which = "direct";
  auto* inject_cmd = app.add_subcommand("inject", "single deterministic error injections at p=0");
  inject_cmd->add_option("--circuit", inject_which, "direct|ft|both")->capture_default_str();

  int jobs = 1;
  bool trace = false;
  auto* sweep_cmd = app.add_subcommand("sweep", "fidelity sweep over the configured p grid");
  sweep_cmd->add_option("--jobs", jobs, "parallel sweep-point workers")->capture_default_str();
  sweep_cmd->add_flag("--trace", trace, "write per-point scenario traces");

  std::string fit_in;
  double fit_pmin = 1e-6, fit_pmax = 1e-4;
  auto* fit_cmd = app.add_subcommand("fit-c", "fit the quadratic failure coefficient");
  fit_cmd->add_option("--in", fit_in, "sweep_detail.csv produced by `sweep`");
  fit_cmd->add_option("--p-min", fit_pmin, "fit window lower edge")->capture_default_str();
  fit_cmd->add_option("--p-max", fit_pmax, "fit window upper edge")->capture_default_str();
  fit_cmd->add_option("--jobs", jobs, "parallel sweep-point workers");

  std::string cross_in;
  double cross_pmin = 1e-5, cross_pmax = 2e-4;
  auto* cross_cmd = app.add_subcommand("crossover", "locate the direct/fault-tolerant crossover");
  cross_cmd->add_option("--in", cross_in, "sweep_detail.csv for the bracket");
  cross_cmd->add_option("--p-min", cross_pmin, "bracket range lower edge")->capture_default_str();
  cross_cmd->add_option("--p-max", cross_pmax, "bracket range upper edge")->capture_default_str();
  cross_cmd->add_option("--jobs", jobs, "parallel sweep-point workers");

  std::string emit_in, codeword_dump;
  auto* emit_cmd = app.add_subcommand("emit", "write plot-ready sweep datasets");
  emit_cmd->add_option("--in", emit_in, "sweep_detail.csv to re-emit (otherwise runs a sweep)");
  emit_cmd->add_option("--jobs", jobs, "parallel sweep-point workers");
  emit_cmd->add_option("--dump-codeword", codeword_dump, "also dump the logical-zero matrix to this file");

  CLI11_PARSE(app, argc, argv);

  try {
    if (stats_cmd->parsed()) return cmd_stats(g);
    if (inject_cmd->parsed()) return cmd_inject(g, inject_which);
    if (sweep_cmd->parsed()) return cmd_sweep(g, jobs, trace);
    if (fit_cmd->parsed()) return cmd_fit_c(g, fit_in, fit_pmin, fit_pmax, jobs);
    if (cross_cmd->parsed()) return cmd_crossover(g, cross_in, cross_pmin, cross_pmax, jobs);
    if (emit_cmd->parsed()) return cmd_emit(g, emit_in, jobs, codeword_dump);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
