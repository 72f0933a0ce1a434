// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "ftprep/quadtree.hpp"
#include "ftprep/types.hpp"

namespace ftprep {

enum class Backend { kSparse, kDense };

struct SparseOptions {
  std::uint32_t leaf_side = 4;
  double prune_tol = kDefaultPruneTol;
};

// Mixture of unitaries: rho -> sum_k weight_k U_k rho U_k^dagger.
struct KrausChannel {
  struct Term {
    double weight;
    Mat2 op;
  };
  std::vector<Term> terms;

  void validate() const;
};

// Thrown when a forced measurement outcome has probability below the floor,
// i.e. the scenario branch is impossible.
struct ImpossibleBranch : std::runtime_error {
  explicit ImpossibleBranch(double p)
      : std::runtime_error("forced measurement outcome has negligible probability"), probability(p) {}
  double probability;
};

// Density matrix over n qubits with a sparse (quadtree) or dense backend.
// Qubit 0 is the most significant bit of basis-state indices. States stay
// normalized: measure_forced renormalizes and reports the branch probability.
class DensityMatrix {
 public:
  static DensityMatrix basis_state(int num_qubits, std::string_view label,
                                   Backend backend = Backend::kSparse, SparseOptions opts = {});
  // |psi><psi| from a sparse state-vector support list.
  static DensityMatrix from_state_vector(int num_qubits,
                                         const std::vector<std::pair<std::uint64_t, Amp>>& amplitudes,
                                         Backend backend = Backend::kSparse, SparseOptions opts = {});

  int num_qubits() const { return num_qubits_; }
  std::uint64_t dim() const { return std::uint64_t{1} << num_qubits_; }
  Backend backend() const { return backend_; }
  const SparseOptions& sparse_options() const { return opts_; }

  void apply_one_qubit(int target, const Mat2& u);
  void apply_two_qubit(int a, int b, const Mat4& u);
  void apply_channel(int target, const KrausChannel& ch);

  // Probability of observing `outcome` on `target` (trace assumed positive).
  double outcome_probability(int target, int outcome) const;
  // Projects onto the forced outcome and renormalizes; returns the outcome's
  // probability. Throws ImpossibleBranch below `floor`.
  double measure_forced(int target, int outcome, double floor = kDefaultOutcomeFloor);
  void reset_qubit(int target);

  double trace() const;
  // tr(this * other); real for Hermitian operands.
  double overlap(const DensityMatrix& other) const;
  Amp element(std::uint64_t row, std::uint64_t col) const;

  DensityMatrix to_dense() const;
  DensityMatrix to_sparse(SparseOptions opts = {}) const;
  // Partial trace over the last `num_tail` qubits (the least significant bits).
  DensityMatrix trace_out_tail(int num_tail) const;

  std::size_t nonzero_count() const;
  std::size_t approx_bytes() const;
  bool sparse_root_absent() const { return backend_ == Backend::kSparse && tree_.empty(); }
  const QuadTree& tree() const;

  bool is_hermitian(double tol = kHermitianTol) const;
  static double max_abs_diff(const DensityMatrix& a, const DensityMatrix& b);

  // One `row col re im` line per nonzero, sorted by (row, col), 17 significant
  // digits.
  void dump_nonzeros(std::ostream& os) const;

 private:
  DensityMatrix(int num_qubits, Backend backend, SparseOptions opts);

  void apply_superop1(int target, const QuadTree::Superop1& m);
  void apply_superop2(int a, int b, const QuadTree::Superop2& m);

  int num_qubits_ = 0;
  Backend backend_ = Backend::kSparse;
  SparseOptions opts_;
  QuadTree tree_;
  std::vector<Amp> dense_;
};

QuadTree::Superop1 superop_from_unitary(const Mat2& u);
QuadTree::Superop1 superop_from_channel(const KrausChannel& ch);
QuadTree::Superop2 superop_from_unitary(const Mat4& u);

}  // namespace ftprep
