// SPDX-License-Identifier: Apache-2.0
//
// Test-only oracles: naive full-matrix references, an Eigen eigenvalue check,
// and a deterministic random-program generator. Everything here is
// independent of the engine's sparse and dense execution paths.
#pragma once

#include <complex>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "ftprep/density_matrix.hpp"
#include "ftprep/gates.hpp"
#include "ftprep/noise.hpp"

namespace ftprep::testing {

using CMat = Eigen::MatrixXcd;

inline CMat to_eigen(const DensityMatrix& dm) {
  const auto d = static_cast<Eigen::Index>(dm.dim());
  CMat m(d, d);
  for (Eigen::Index r = 0; r < d; ++r)
    for (Eigen::Index c = 0; c < d; ++c)
      m(r, c) = dm.element(static_cast<std::uint64_t>(r), static_cast<std::uint64_t>(c));
  return m;
}

inline double min_eigenvalue(const DensityMatrix& dm) {
  Eigen::SelfAdjointEigenSolver<CMat> solver(to_eigen(dm));
  return solver.eigenvalues().minCoeff();
}

// Naive reference: embeds u on `targets` of an n-qubit register and conjugates
// by explicit matrix products.
inline CMat embed_one(int n, int q, const Mat2& u) {
  CMat m = CMat::Identity(1, 1);
  for (int k = 0; k < n; ++k) {
    CMat g;
    if (k == q) {
      g = CMat(2, 2);
      for (int r = 0; r < 2; ++r)
        for (int c = 0; c < 2; ++c) g(r, c) = u(r, c);
    } else {
      g = CMat::Identity(2, 2);
    }
    CMat next(m.rows() * 2, m.cols() * 2);
    for (Eigen::Index r = 0; r < m.rows(); ++r)
      for (Eigen::Index c = 0; c < m.cols(); ++c) next.block(r * 2, c * 2, 2, 2) = m(r, c) * g;
    m = next;
  }
  return m;
}

inline CMat embed_two(int n, int a, int b, const Mat4& u) {
  const Eigen::Index d = Eigen::Index{1} << n;
  CMat m = CMat::Zero(d, d);
  const int sa = n - 1 - a, sb = n - 1 - b;
  for (Eigen::Index r = 0; r < d; ++r)
    for (Eigen::Index c = 0; c < d; ++c) {
      const int rb = static_cast<int>(((r >> sa) & 1) << 1 | ((r >> sb) & 1));
      const int cb = static_cast<int>(((c >> sa) & 1) << 1 | ((c >> sb) & 1));
      const Eigen::Index r_rest = r & ~((Eigen::Index{1} << sa) | (Eigen::Index{1} << sb));
      const Eigen::Index c_rest = c & ~((Eigen::Index{1} << sa) | (Eigen::Index{1} << sb));
      if (r_rest != c_rest) continue;
      m(r, c) = u(rb, cb);
    }
  return m;
}

inline CMat conjugate(const CMat& u, const CMat& rho) { return u * rho * u.adjoint(); }

inline double max_abs_diff(const CMat& a, const CMat& b) { return (a - b).cwiseAbs().maxCoeff(); }

inline Mat2 random_unitary2(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> angle(0.0, 2.0 * M_PI);
  const double th = angle(rng), ph = angle(rng), la = angle(rng);
  const Amp i{0, 1};
  Mat2 u;
  u(0, 0) = std::cos(th / 2);
  u(0, 1) = -std::exp(i * la) * std::sin(th / 2);
  u(1, 0) = std::exp(i * ph) * std::sin(th / 2);
  u(1, 1) = std::exp(i * (ph + la)) * std::cos(th / 2);
  return u;
}

inline Mat4 random_unitary4(std::mt19937_64& rng) {
  const Mat4 a = kron(random_unitary2(rng), random_unitary2(rng));
  const Mat4 b = kron(random_unitary2(rng), random_unitary2(rng));
  return a * gates::cnot() * b;
}

// A random engine program applied op-by-op; used to drive sparse and dense
// backends in lockstep.
struct ProgramOp {
  enum class Kind { kU1, kU2, kChannel, kMeasure, kReset } kind;
  int a = 0, b = 0;
  Mat2 u2;
  Mat4 u4;
  double p = 0;
  int preferred_outcome = 0;
};

inline std::vector<ProgramOp> random_program(std::mt19937_64& rng, int n, int num_ops) {
  std::vector<ProgramOp> prog;
  std::uniform_int_distribution<int> qubit(0, n - 1);
  std::uniform_int_distribution<int> kind(0, 9);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int k = 0; k < num_ops; ++k) {
    ProgramOp op;
    const int roll = kind(rng);
    if (roll < 4) {
      op.kind = ProgramOp::Kind::kU1;
      op.a = qubit(rng);
      op.u2 = random_unitary2(rng);
    } else if (roll < 7 && n >= 2) {
      op.kind = ProgramOp::Kind::kU2;
      op.a = qubit(rng);
      do {
        op.b = qubit(rng);
      } while (op.b == op.a);
      op.u4 = (roll == 4) ? gates::cnot() : random_unitary4(rng);
    } else if (roll < 8) {
      op.kind = ProgramOp::Kind::kChannel;
      op.a = qubit(rng);
      op.p = unit(rng);
    } else if (roll < 9) {
      op.kind = ProgramOp::Kind::kMeasure;
      op.a = qubit(rng);
      op.preferred_outcome = static_cast<int>(rng() & 1);
    } else {
      op.kind = ProgramOp::Kind::kReset;
      op.a = qubit(rng);
    }
    prog.push_back(op);
  }
  return prog;
}

// Applies one op; for measurements, uses `forced_outcome` when >= 0, else
// picks the preferred outcome (falling back to its complement when too
// unlikely) and returns the choice so a second backend can replay it.
inline int apply_program_op(DensityMatrix& dm, const ProgramOp& op, int forced_outcome = -1) {
  switch (op.kind) {
    case ProgramOp::Kind::kU1:
      dm.apply_one_qubit(op.a, op.u2);
      break;
    case ProgramOp::Kind::kU2:
      dm.apply_two_qubit(op.a, op.b, op.u4);
      break;
    case ProgramOp::Kind::kChannel:
      dm.apply_channel(op.a, depolarizing_channel(op.p));
      break;
    case ProgramOp::Kind::kMeasure: {
      int outcome = forced_outcome;
      if (outcome < 0) {
        outcome = op.preferred_outcome;
        if (dm.outcome_probability(op.a, outcome) < 1e-3) outcome = 1 - outcome;
      }
      dm.measure_forced(op.a, outcome);
      return outcome;
    }
    case ProgramOp::Kind::kReset:
      dm.reset_qubit(op.a);
      break;
  }
  return -1;
}

}  // namespace ftprep::testing
