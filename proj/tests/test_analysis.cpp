// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <sstream>

#include "ftprep/analysis.hpp"
#include "test_support.hpp"

using namespace ftprep;

TEST_CASE("direct-circuit injection census") {
  const Config cfg = Config::defaults();
  const Circuit direct = steane::direct_circuit();
  const InjectionReport report = inject_single(direct, "direct", cfg);
  CHECK(report.records.size() == 63);  // 21 locations x 3 Paulis

  // every injection after the final step leaves a single-qubit error
  for (const InjectionRecord& r : report.records)
    if (r.step == 2) CHECK(r.success == doctest::Approx(1.0).epsilon(1e-9));

  // the six failing locations: X and XZ on the three pivot qubits after step 2
  CHECK(report.failing_count == 6);
  for (const InjectionRecord& r : report.records) {
    const bool is_failing = r.success < 0.5;
    const bool expected = r.step == 1 && (r.qubit == 0 || r.qubit == 1 || r.qubit == 3) &&
                          (r.pauli == PauliError::kX || r.pauli == PauliError::kXZ);
    CHECK(is_failing == expected);
    // pure Pauli corruption keeps S at exactly 0 or 1
    CHECK((r.success < 1e-9 || r.success > 1.0 - 1e-9));
  }
}

TEST_CASE("injection csv format") {
  InjectionReport report;
  report.circuit_name = "direct";
  report.records = {{0, 0, PauliError::kX, 1.0}, {1, 3, PauliError::kXZ, 0.0}};
  std::ostringstream os;
  write_injection_csv(os, report);
  CHECK(os.str() == "step,qubit,pauli,success\n1,1,X,1\n2,4,XZ,0\n");
}

TEST_CASE("synthetic quadratic fit recovers the coefficient") {
  std::vector<SweepPoint> pts;
  const double c0 = 1e4;
  for (double p : {1e-6, 3e-6, 1e-5, 3e-5, 1e-4}) {
    SweepPoint pt;
    pt.p = p;
    pt.s_ft = 1.0 - c0 * p * p;
    pt.f_ft = 1.0 - 2.0 * c0 * p * p;
    pts.push_back(pt);
  }
  const FitResult fit = fit_quadratic_failure(pts, FitWindow{1e-6, 1e-4});
  CHECK(fit.c_success == doctest::Approx(c0).epsilon(1e-3));
  CHECK(fit.c_fidelity == doctest::Approx(2 * c0).epsilon(1e-3));
  CHECK(fit.points_used == 5);
  CHECK(fit.well_conditioned);
}

TEST_CASE("fit rejects too few points and flags bad residuals") {
  std::vector<SweepPoint> pts(3);
  pts[0].p = 1e-6;
  pts[1].p = 1e-5;
  pts[2].p = 1e-4;
  CHECK_THROWS_AS(fit_quadratic_failure(pts, FitWindow{1e-6, 1e-4}), std::invalid_argument);

  // linear (non-quadratic) data cannot fit cp^2 within 5%
  std::vector<SweepPoint> lin;
  for (double p : {1e-6, 1e-5, 5e-5, 1e-4}) {
    SweepPoint pt;
    pt.p = p;
    pt.s_ft = 1.0 - 10.0 * p;
    pt.f_ft = 1.0 - 20.0 * p;
    lin.push_back(pt);
  }
  const FitResult fit = fit_quadratic_failure(lin, FitWindow{1e-6, 1e-4});
  CHECK_FALSE(fit.well_conditioned);
}

TEST_CASE("naive pair count") {
  CHECK(pair_count(720) == 258840);
  CHECK(pair_count(2) == 1);
  CHECK(pair_count(960) == 460320);
}

TEST_CASE("synthetic crossover via the closed forms") {
  // F_d = 1 - 4p, F_ft = 1 - 2 c p^2 with c = 7.7e4: root at 4p = 2cp^2
  const double c = 7.7e4;
  const double expected_root = 2.0 / c;  // ~2.597e-5
  auto synth = [&](double p) {
    SweepPoint pt;
    pt.p = p;
    pt.s_direct = 1.0 - 2.0 * p;
    pt.f_direct = 1.0 - 4.0 * p;
    pt.s_ft = 1.0 - c * p * p;
    pt.f_ft = 1.0 - 2.0 * c * p * p;
    return pt;
  };
  std::vector<SweepPoint> sweep;
  for (double p : {1e-5, 2e-5, 4e-5, 8e-5, 1.6e-4}) sweep.push_back(synth(p));
  FitResult fit;
  fit.c_success = c;
  fit.c_fidelity = 2 * c;
  const CrossoverEstimate est = find_crossover(sweep, synth, fit, 6, 720);
  REQUIRE(est.bracketed);
  CHECK(est.p_cr == doctest::Approx(expected_root).epsilon(1e-3));
  CHECK(est.p_cr_unsquared == doctest::Approx(expected_root).epsilon(1e-3));
  // closed form 2k/(3 c_fidelity) with k=6 equals the same root
  CHECK(est.closed_form_p_cr == doctest::Approx(2.0 * 6 / (3.0 * 2 * c)).epsilon(1e-12));
  CHECK(est.closed_form_p_cr == doctest::Approx(expected_root).epsilon(1e-12));
  CHECK(est.naive_c == 258840);
}

TEST_CASE("crossover without a bracket") {
  std::vector<SweepPoint> sweep;
  for (double p : {1e-6, 1e-5}) {
    SweepPoint pt;
    pt.p = p;
    pt.f_direct = 0.5;
    pt.f_ft = 0.9;
    sweep.push_back(pt);
  }
  FitResult fit;
  fit.c_fidelity = 1.0;
  const CrossoverEstimate est =
      find_crossover(sweep, [](double) { return SweepPoint{}; }, fit, 6, 720);
  CHECK_FALSE(est.bracketed);
}

TEST_CASE("sweep csv round trip at 17 significant digits") {
  std::vector<SweepPoint> pts;
  SweepPoint a;
  a.p = 1.2345678901234567e-5;
  a.f_direct = 0.99995061728394818;
  a.f_ft = 0.99999998765432109;
  a.f_ft_err = 4.9382716049382713e-10;
  pts.push_back(a);
  std::ostringstream os;
  write_sweep_csv(os, pts);
  std::istringstream is(os.str());
  const auto back = read_sweep_csv(is);
  REQUIRE(back.size() == 1);
  CHECK(back[0].p == a.p);
  CHECK(back[0].f_direct == a.f_direct);
  CHECK(back[0].f_ft == a.f_ft);
  CHECK(back[0].f_ft_err == a.f_ft_err);

  SUBCASE("header only for an empty sweep") {
    std::ostringstream empty;
    write_sweep_csv(empty, {});
    CHECK(empty.str() == "p,f_direct,f_ft,f_ft_err\n");
  }
}

TEST_CASE("detail csv round trip") {
  SweepPoint a;
  a.p = 3.1622776601683795e-06;
  a.f_direct = 0.99998734;
  a.f_ft = 0.99999999;
  a.f_ft_err = 1e-10;
  a.s_direct = 0.99999367;
  a.s_ft = 0.999999995;
  a.s_ft_err = 1e-10;
  a.ft_mass = 0.9999999998;
  a.ft_scenarios = 42;
  a.ft_capped = 0;
  std::ostringstream os;
  write_sweep_detail_csv(os, std::vector<SweepPoint>{a});
  std::istringstream is(os.str());
  const auto back = read_sweep_detail_csv(is);
  REQUIRE(back.size() == 1);
  CHECK(back[0].s_ft == a.s_ft);
  CHECK(back[0].ft_scenarios == 42);
}

TEST_CASE("config parsing") {
  const Config def = Config::defaults();
  CHECK(def.p_grid.size() == 12);
  CHECK(def.p_grid.front() == doctest::Approx(1e-6));
  CHECK(def.p_grid.back() == doctest::Approx(1e-2));

  const Config cfg = Config::from_json(R"({
    "p_grid": [1e-5, 1e-4],
    "mass_target": 0.999,
    "max_scenarios": 500,
    "leaf_size": 8,
    "prune_tol": 1e-14,
    "backend": "dense",
    "seedless": true
  })");
  CHECK(cfg.p_grid.size() == 2);
  CHECK(cfg.mass_target == 0.999);
  CHECK(cfg.max_scenarios == 500);
  CHECK(cfg.leaf_size == 8);
  CHECK(cfg.prune_tol == 1e-14);
  CHECK(cfg.backend == Backend::kDense);

  CHECK_THROWS_AS(Config::from_json(R"({"seedless": false})"), std::invalid_argument);
  CHECK_THROWS_AS(Config::from_json(R"({"backend": "gpu"})"), std::invalid_argument);

  // round trip through to_json
  const Config back = Config::from_json(cfg.to_json());
  CHECK(back.p_grid == cfg.p_grid);
  CHECK(back.backend == cfg.backend);
}

TEST_CASE("sweep determinism and direct-point physics") {
  // two identical tiny sweeps must serialize bit-identically, and the direct
  // fidelity must track 1 - 4p at small p
  const Config cfg = [] {
    Config c = Config::defaults();
    c.p_grid = {1e-5, 1e-4};
    return c;
  }();
  const Circuit direct = steane::direct_circuit();
  const Circuit ft = steane::ft_circuit();

  auto run_one = [&] {
    // direct only: evaluate_point would run the FT circuit too; keep this
    // test quick by sweeping the direct side through run_circuit directly
    std::vector<SweepPoint> pts;
    for (double p : cfg.p_grid) {
      const RunResult r =
          run_circuit(direct, DensityMatrix::basis_state(7, "0000000"), NoiseModel{p}, "");
      const double s = steane::success_probability(r.state);
      SweepPoint pt;
      pt.p = p;
      pt.s_direct = s;
      pt.f_direct = s * s;
      pts.push_back(pt);
    }
    return pts;
  };
  const auto a = run_one();
  const auto b = run_one();
  std::ostringstream csv_a, csv_b;
  write_sweep_detail_csv(csv_a, a);
  write_sweep_detail_csv(csv_b, b);
  CHECK(csv_a.str() == csv_b.str());

  for (const SweepPoint& pt : a) {
    CHECK(pt.f_direct == doctest::Approx(1.0 - 4.0 * pt.p).epsilon(2e-2));
    // slope consistency at 1e-4: |F - (1-4p)| small (second order ~ p^2)
    if (pt.p == 1e-4) CHECK(std::abs(pt.f_direct - (1.0 - 4.0 * pt.p)) < 1e-6);
  }
  (void)ft;
}
