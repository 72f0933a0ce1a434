// SPDX-License-Identifier: Apache-2.0
#include "ftprep/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <future>
#include <map>
#include <ostream>
#include <sstream>

#include <json.hpp>

namespace ftprep {

using nlohmann::json;

Config Config::defaults() {
  Config cfg;
  cfg.p_grid.resize(12);
  for (int i = 0; i < 12; ++i) cfg.p_grid[static_cast<std::size_t>(i)] = std::pow(10.0, -6.0 + 4.0 * i / 11.0);
  return cfg;
}

Config Config::from_json(const std::string& text) {
  const json j = json::parse(text);
  Config cfg = defaults();
  if (j.contains("p_grid")) cfg.p_grid = j.at("p_grid").get<std::vector<double>>();
  cfg.mass_target = j.value("mass_target", cfg.mass_target);
  cfg.max_scenarios = j.value("max_scenarios", cfg.max_scenarios);
  cfg.leaf_size = j.value("leaf_size", cfg.leaf_size);
  cfg.prune_tol = j.value("prune_tol", cfg.prune_tol);
  cfg.adaptive_mass = j.value("adaptive_mass", cfg.adaptive_mass);
  if (j.contains("backend")) {
    const std::string b = j.at("backend").get<std::string>();
    if (b == "sparse")
      cfg.backend = Backend::kSparse;
    else if (b == "dense")
      cfg.backend = Backend::kDense;
    else
      throw std::invalid_argument("config: backend must be 'sparse' or 'dense'");
  }
  cfg.seedless = j.value("seedless", true);
  if (!cfg.seedless)
    throw std::invalid_argument("config: the engine is fully deterministic; seedless must stay true");
  return cfg;
}

Config Config::from_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open config: " + path);
  std::string text((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
  return from_json(text);
}

std::string Config::to_json() const {
  json j;
  j["p_grid"] = p_grid;
  j["mass_target"] = mass_target;
  j["max_scenarios"] = max_scenarios;
  j["leaf_size"] = leaf_size;
  j["prune_tol"] = prune_tol;
  j["backend"] = backend == Backend::kSparse ? "sparse" : "dense";
  j["seedless"] = seedless;
  j["adaptive_mass"] = adaptive_mass;
  return j.dump(2);
}

ScenarioScorer steane_scorer() {
  return [](const DensityMatrix& final_state) {
    DensityMatrix data = final_state.num_qubits() == steane::kDataQubits
                             ? final_state
                             : final_state.trace_out_tail(final_state.num_qubits() - steane::kDataQubits);
    const double s = steane::success_probability(data);
    return ScenarioScore{s, s * s};
  };
}

InjectionReport inject_single(const Circuit& circuit, const std::string& name, const Config& cfg) {
  InjectionReport report;
  report.circuit_name = name;
  report.qubits = circuit.num_qubits;
  report.depth = static_cast<int>(circuit.steps.size());
  const NoiseModel noiseless{0.0};
  std::string zeros(static_cast<std::size_t>(circuit.num_qubits), '0');
  const DensityMatrix init = DensityMatrix::basis_state(circuit.num_qubits, zeros, cfg.backend, cfg.sparse());
  const ScenarioScorer scorer = steane_scorer();
  for (int step = 0; step < report.depth; ++step)
    for (int qubit = 0; qubit < circuit.num_qubits; ++qubit)
      for (PauliError pauli : {PauliError::kX, PauliError::kZ, PauliError::kXZ}) {
        EnumerateOptions eo;
        eo.mass_target = 1.0;
        eo.max_scenarios = cfg.max_scenarios;
        eo.injections = {Injection{step, qubit, pauli}};
        const AggregateResult agg = enumerate_scenarios(circuit, init, noiseless, scorer, eo);
        const double s = agg.weighted_success;
        report.records.push_back({step, qubit, pauli, s});
        if (s < 1.0 - 1e-6) ++report.failing_count;
      }
  return report;
}

SweepPoint evaluate_point(const Circuit& direct, const Circuit& ft, double p, const Config& cfg) {
  const NoiseModel model{p};
  SweepPoint pt;
  pt.p = p;

  std::string zeros_d(static_cast<std::size_t>(direct.num_qubits), '0');
  const DensityMatrix init_d =
      DensityMatrix::basis_state(direct.num_qubits, zeros_d, cfg.backend, cfg.sparse());
  const RunResult rd = run_circuit(direct, init_d, model, "");
  const ScenarioScore sd = steane_scorer()(rd.state);
  pt.s_direct = sd.success;
  pt.f_direct = sd.fidelity;

  std::string zeros_f(static_cast<std::size_t>(ft.num_qubits), '0');
  const DensityMatrix init_f = DensityMatrix::basis_state(ft.num_qubits, zeros_f, cfg.backend, cfg.sparse());
  EnumerateOptions eo;
  eo.mass_target = cfg.mass_target;
  eo.max_scenarios = cfg.max_scenarios;
  ScenarioEnumerator en(ft, init_f, model, steane_scorer(), eo);
  if (cfg.adaptive_mass) {
    // Tighten the mass target iteratively until the interval half-width is
    // well below the measured failure deficit. Early iterations overestimate
    // the deficit through the residual midpoint, so the loop converges in a
    // couple of rounds.
    double target_residual = 1e-3;
    for (int iter = 0; iter < 5; ++iter) {
      en.extend(1.0 - target_residual, cfg.max_scenarios);
      const double deficit = std::max(1.0 - en.result().success_mid(), 1e-12);
      const double want = std::clamp(0.02 * deficit, 1e-12, 1e-5);
      if (en.result().residual() <= want * (1 + 1e-9) || en.result().cap_hit) break;
      target_residual = want;
    }
  } else {
    en.extend(cfg.mass_target, cfg.max_scenarios);
  }
  const AggregateResult& agg = en.result();
  pt.f_ft = agg.fidelity_mid();
  pt.f_ft_err = agg.half_width();
  pt.s_ft = agg.success_mid();
  pt.s_ft_err = agg.half_width();
  pt.ft_mass = agg.explored_mass;
  pt.ft_scenarios = static_cast<double>(agg.scenarios_explored);
  pt.ft_capped = agg.cap_hit ? 1.0 : 0.0;
  return pt;
}

std::vector<SweepPoint> run_sweep(const Circuit& direct, const Circuit& ft,
                                  std::span<const double> p_values, const Config& cfg, int jobs) {
  if (jobs < 1) jobs = 1;
  std::vector<SweepPoint> out(p_values.size());
  for (std::size_t base = 0; base < p_values.size(); base += static_cast<std::size_t>(jobs)) {
    const std::size_t end = std::min(p_values.size(), base + static_cast<std::size_t>(jobs));
    std::vector<std::future<SweepPoint>> futs;
    for (std::size_t i = base; i < end; ++i) {
      const double p = p_values[i];
      futs.push_back(
          std::async(std::launch::async, [&, p] { return evaluate_point(direct, ft, p, cfg); }));
    }
    for (std::size_t i = base; i < end; ++i) out[i] = futs[i - base].get();
  }
  return out;
}

FitResult fit_quadratic_failure(std::span<const SweepPoint> sweep, FitWindow window, double residual_tol) {
  FitResult fit;
  std::vector<const SweepPoint*> pts;
  for (const SweepPoint& pt : sweep)
    if (pt.p >= window.p_min * (1 - 1e-12) && pt.p <= window.p_max * (1 + 1e-12)) pts.push_back(&pt);
  fit.points_used = static_cast<int>(pts.size());
  if (pts.size() < 4)
    throw std::invalid_argument("fit_quadratic_failure: need at least 4 sweep points inside the window");
  auto least_squares = [&](auto deficit) {
    double num = 0, den = 0;
    for (const SweepPoint* pt : pts) {
      const double x = pt->p * pt->p;
      num += deficit(*pt) * x;
      den += x * x;
    }
    return num / den;
  };
  auto max_rel_residual = [&](auto deficit, double c) {
    double mx = 0;
    for (const SweepPoint* pt : pts) {
      const double x = pt->p * pt->p;
      const double model = c * x;
      if (model <= 0) return std::numeric_limits<double>::infinity();
      mx = std::max(mx, std::abs(deficit(*pt) - model) / model);
    }
    return mx;
  };
  auto s_deficit = [](const SweepPoint& pt) { return 1.0 - pt.s_ft; };
  auto f_deficit = [](const SweepPoint& pt) { return 1.0 - pt.f_ft; };
  fit.c_success = least_squares(s_deficit);
  fit.c_fidelity = least_squares(f_deficit);
  fit.max_rel_residual_success = max_rel_residual(s_deficit, fit.c_success);
  fit.max_rel_residual_fidelity = max_rel_residual(f_deficit, fit.c_fidelity);
  fit.well_conditioned = fit.max_rel_residual_success <= residual_tol &&
                         fit.max_rel_residual_fidelity <= residual_tol;
  return fit;
}

long long pair_count(long long area) { return area * (area - 1) / 2; }

namespace {

// Secant refinement in log10(p) of diff(pt) = 0 inside a sign-change bracket,
// with cached simulator evaluations.
double refine_root(double p_lo, double p_hi, const PointEvaluator& eval,
                   const std::function<double(const SweepPoint&)>& diff,
                   std::map<double, SweepPoint>& cache) {
  auto value = [&](double p) {
    auto it = cache.find(p);
    if (it == cache.end()) it = cache.emplace(p, eval(p)).first;
    return diff(it->second);
  };
  double lo = std::log10(p_lo), hi = std::log10(p_hi);
  double g_lo = value(p_lo), g_hi = value(p_hi);
  if (g_lo == 0) return p_lo;
  if (g_hi == 0) return p_hi;
  for (int iter = 0; iter < 40 && (hi - lo) > 1e-4; ++iter) {
    double x = lo + (hi - lo) * g_lo / (g_lo - g_hi);  // secant in log space
    const double margin = 0.05 * (hi - lo);
    x = std::clamp(x, lo + margin, hi - margin);
    const double g = value(std::pow(10.0, x));
    if (g == 0) return std::pow(10.0, x);
    if ((g > 0) == (g_lo > 0)) {
      lo = x;
      g_lo = g;
    } else {
      hi = x;
      g_hi = g;
    }
  }
  // final linear interpolation on the bracket
  const double x = lo + (hi - lo) * g_lo / (g_lo - g_hi);
  return std::pow(10.0, x);
}

}  // namespace

CrossoverEstimate find_crossover(std::span<const SweepPoint> sweep, const PointEvaluator& eval,
                                 const FitResult& fit, int k_direct, int ft_area) {
  CrossoverEstimate est;
  est.c_fit = fit.c_fidelity;
  est.c_fit_success = fit.c_success;
  est.k_direct = k_direct;
  est.naive_c = pair_count(ft_area);
  if (fit.c_fidelity > 0) est.closed_form_p_cr = 2.0 * k_direct / (3.0 * fit.c_fidelity);

  std::vector<SweepPoint> pts(sweep.begin(), sweep.end());
  std::sort(pts.begin(), pts.end(), [](const SweepPoint& a, const SweepPoint& b) { return a.p < b.p; });
  auto f_diff = [](const SweepPoint& pt) { return pt.f_ft - pt.f_direct; };
  auto s_diff = [](const SweepPoint& pt) { return pt.s_ft - pt.s_direct; };
  int bracket = -1;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    if (f_diff(pts[i]) == 0) {
      est.bracketed = true;
      est.p_cr = est.p_cr_unsquared = pts[i].p;
      return est;
    }
    if ((f_diff(pts[i]) > 0) != (f_diff(pts[i + 1]) > 0)) {
      bracket = static_cast<int>(i);
      break;
    }
  }
  if (bracket < 0) return est;  // caller reports the bracket failure

  est.bracketed = true;
  std::map<double, SweepPoint> cache;
  for (const SweepPoint& pt : pts) cache.emplace(pt.p, pt);
  const double lo = pts[static_cast<std::size_t>(bracket)].p;
  const double hi = pts[static_cast<std::size_t>(bracket) + 1].p;
  est.p_cr = refine_root(lo, hi, eval, f_diff, cache);
  est.p_cr_unsquared = refine_root(lo, hi, eval, s_diff, cache);
  return est;
}

// ---------------------------------------------------------------------------
// CSV / report I/O

namespace {

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::vector<double> parse_csv_line(const std::string& line) {
  std::vector<double> out;
  std::istringstream ss(line);
  std::string field;
  while (std::getline(ss, field, ',')) out.push_back(std::strtod(field.c_str(), nullptr));
  return out;
}

}  // namespace

void write_sweep_csv(std::ostream& os, std::span<const SweepPoint> points) {
  os << "p,f_direct,f_ft,f_ft_err\n";
  for (const SweepPoint& pt : points)
    os << fmt17(pt.p) << ',' << fmt17(pt.f_direct) << ',' << fmt17(pt.f_ft) << ',' << fmt17(pt.f_ft_err)
       << '\n';
}

void write_sweep_detail_csv(std::ostream& os, std::span<const SweepPoint> points) {
  os << "p,f_direct,f_ft,f_ft_err,s_direct,s_ft,s_ft_err,ft_mass,ft_scenarios,ft_capped\n";
  for (const SweepPoint& pt : points)
    os << fmt17(pt.p) << ',' << fmt17(pt.f_direct) << ',' << fmt17(pt.f_ft) << ',' << fmt17(pt.f_ft_err)
       << ',' << fmt17(pt.s_direct) << ',' << fmt17(pt.s_ft) << ',' << fmt17(pt.s_ft_err) << ','
       << fmt17(pt.ft_mass) << ',' << fmt17(pt.ft_scenarios) << ',' << fmt17(pt.ft_capped) << '\n';
}

std::vector<SweepPoint> read_sweep_csv(std::istream& is) {
  std::vector<SweepPoint> out;
  std::string line;
  if (!std::getline(is, line)) return out;
  if (line != "p,f_direct,f_ft,f_ft_err") throw std::invalid_argument("sweep csv: unexpected header");
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const auto f = parse_csv_line(line);
    if (f.size() != 4) throw std::invalid_argument("sweep csv: expected 4 fields");
    SweepPoint pt;
    pt.p = f[0];
    pt.f_direct = f[1];
    pt.f_ft = f[2];
    pt.f_ft_err = f[3];
    out.push_back(pt);
  }
  return out;
}

std::vector<SweepPoint> read_sweep_detail_csv(std::istream& is) {
  std::vector<SweepPoint> out;
  std::string line;
  if (!std::getline(is, line)) return out;
  if (line != "p,f_direct,f_ft,f_ft_err,s_direct,s_ft,s_ft_err,ft_mass,ft_scenarios,ft_capped")
    throw std::invalid_argument("sweep detail csv: unexpected header");
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const auto f = parse_csv_line(line);
    if (f.size() != 10) throw std::invalid_argument("sweep detail csv: expected 10 fields");
    SweepPoint pt{f[0], f[1], f[2], f[3], f[4], f[5], f[6], f[7], f[8], f[9]};
    out.push_back(pt);
  }
  return out;
}

void write_injection_csv(std::ostream& os, const InjectionReport& report) {
  os << "step,qubit,pauli,success\n";
  for (const InjectionRecord& r : report.records)
    os << (r.step + 1) << ',' << (r.qubit + 1) << ',' << pauli_error_name(r.pauli) << ','
       << fmt17(r.success) << '\n';
}

std::string crossover_report_json(const CrossoverEstimate& est, const FitResult& fit) {
  json j;
  j["p_cr"] = est.p_cr;
  j["c_fit"] = est.c_fit;
  j["k_direct"] = est.k_direct;
  j["naive_c"] = est.naive_c;
  j["bracketed"] = est.bracketed;
  j["p_cr_unsquared"] = est.p_cr_unsquared;
  j["closed_form_p_cr"] = est.closed_form_p_cr;
  j["c_fit_success"] = est.c_fit_success;
  j["fit"] = {{"points_used", fit.points_used},
              {"max_rel_residual_fidelity", fit.max_rel_residual_fidelity},
              {"max_rel_residual_success", fit.max_rel_residual_success},
              {"well_conditioned", fit.well_conditioned}};
  return j.dump(2);
}

}  // namespace ftprep
