// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "ftprep/types.hpp"

namespace ftprep {

// Sparse storage for a 2^n x 2^n complex matrix. The matrix is split
// recursively into quadrants; a quadrant with no element of magnitude >= the
// prune tolerance is truncated (null child). Recursion stops at small dense
// tiles of side `leaf_side`, so all leaves sit at equal depth.
//
// Quadrant order is (top-left, top-right, bottom-left, bottom-right), i.e.
// child index = (row_bit << 1) | col_bit. Depth d splits on qubit d: qubit 0
// is the most significant bit of a basis index.
//
// Gate and channel applications are expressed as superoperators acting on the
// four quadrants of every node at the target qubit's depth (or on element
// quadruples inside tiles once the qubit's bit lies below the leaf level).
class QuadTree {
 public:
  // One-qubit superoperator: out[K] = sum_I m[K*4+I] * in[I], where
  // K = (row_bit<<1)|col_bit indexes the four quadrants.
  using Superop1 = std::array<Amp, 16>;
  // Two-qubit superoperator on qubits q1 < q2: mega-indices K = (k1<<1)|k2
  // over row bits, L over col bits; coefficient layout m[(K*4+L)*16 + I*4+J].
  using Superop2 = std::array<Amp, 256>;

  QuadTree() = default;
  QuadTree(int num_qubits, std::uint32_t leaf_side, double prune_tol);

  QuadTree(const QuadTree& other);
  QuadTree& operator=(const QuadTree& other);
  QuadTree(QuadTree&&) noexcept = default;
  QuadTree& operator=(QuadTree&&) noexcept = default;

  int num_qubits() const { return num_qubits_; }
  std::uint64_t dim() const { return dim_; }
  std::uint32_t leaf_side() const { return leaf_side_; }
  double prune_tol() const { return prune_tol_; }
  bool empty() const { return root_ == nullptr; }

  void set_element(std::uint64_t row, std::uint64_t col, Amp v);
  void accumulate(std::uint64_t row, std::uint64_t col, Amp v);
  Amp element(std::uint64_t row, std::uint64_t col) const;

  void apply_superop1(int qubit, const Superop1& m);
  void apply_superop2(int qubit_a, int qubit_b, const Superop2& m);

  // Zeroes all elements whose row or column bit at `qubit` differs from
  // `outcome`. No renormalization.
  void project_bit(int qubit, int outcome);
  // Traces out `qubit` and re-embeds it as |0><0|.
  void reset_qubit(int qubit);

  double trace() const;
  double trace_with_bit(int qubit, int outcome) const;
  void scale(Amp factor);

  // sum_{r,c} a(r,c) * b(c,r); geometries must match.
  Amp dot_transpose(const QuadTree& other) const;

  bool is_hermitian(double tol) const;
  double max_abs() const;
  static double max_abs_diff(const QuadTree& a, const QuadTree& b);

  void for_each_nonzero(const std::function<void(std::uint64_t, std::uint64_t, Amp)>& fn) const;
  std::size_t nonzero_count() const;
  std::size_t node_count() const;
  std::size_t approx_bytes() const;

  void prune();
  // Structural invariants: equal leaf depth, no childless internal node, no
  // retained all-subthreshold tile. Returns human-readable violations.
  std::vector<std::string> structure_violations() const;

  void to_dense(std::vector<Amp>& out) const;
  static QuadTree from_dense(const std::vector<Amp>& flat, int num_qubits,
                             std::uint32_t leaf_side, double prune_tol);

 private:
  struct Node;
  using NodePtr = std::unique_ptr<Node>;

  struct Node {
    std::array<NodePtr, 4> child;
    std::vector<Amp> tile;  // non-empty exactly for leaves
    bool is_leaf() const { return !tile.empty(); }
  };

  int levels() const { return levels_; }
  bool in_tile(int qubit) const { return qubit >= levels_; }
  int tile_shift(int qubit) const { return num_qubits_ - 1 - qubit; }

  NodePtr clone_node(const Node* n) const;
  NodePtr make_leaf() const;

  // Fixed-capacity linear-combination term list; avoids per-node allocation
  // in the hot recursion.
  struct TermList {
    std::array<std::pair<Amp, const Node*>, 16> t;
    int n = 0;
    void add(Amp a, const Node* p) {
      if (p && a != Amp{}) t[static_cast<std::size_t>(n++)] = {a, p};
    }
  };

  NodePtr scale_node(NodePtr n, Amp f) const;
  NodePtr clone_scaled(const Node* n, Amp f) const;
  NodePtr lin_comb(const TermList& terms, int depth) const;
  std::array<NodePtr, 4> mix4(std::array<NodePtr, 4> in, const Superop1& m, int child_depth) const;

  NodePtr superop1_rec(NodePtr n, int depth, int qubit, const Superop1& m) const;
  void tile_superop1(std::vector<Amp>& tile, int shift, const Superop1& m) const;
  // In-place (a, b) -> (maa a + mab b, mba a + mbb b) without reallocating
  // aligned subtrees; backs the diagonal-pair fast path of channels.
  std::pair<NodePtr, NodePtr> pair_mix(NodePtr a, NodePtr b, Amp maa, Amp mab, Amp mba, Amp mbb,
                                       int depth) const;

  NodePtr superop2_rec(NodePtr n, int depth, int q1, int q2, const Superop2& m) const;
  std::array<NodePtr, 4> walk4(std::array<NodePtr, 4> cur, int depth, int q2, const Superop2& m) const;
  std::array<NodePtr, 4> mix16(std::array<NodePtr, 4> parents, const Superop2& m, int child_depth) const;
  std::array<NodePtr, 4> mix_tiles_q2(std::array<NodePtr, 4> parents, int shift2, const Superop2& m) const;
  void tile_superop2(std::vector<Amp>& tile, int shift1, int shift2, const Superop2& m) const;

  NodePtr project_rec(NodePtr n, int depth, int qubit, int outcome) const;
  NodePtr reset_rec(NodePtr n, int depth, int qubit) const;
  double trace_rec(const Node* n, int depth) const;
  double trace_bit_rec(const Node* n, int depth, int qubit, int outcome) const;

  NodePtr prune_leaf(NodePtr n) const;
  NodePtr prune_rec(NodePtr n, int depth) const;

  int num_qubits_ = 0;
  std::uint64_t dim_ = 0;
  std::uint32_t leaf_side_ = 0;
  int levels_ = 0;
  double prune_tol_ = kDefaultPruneTol;
  NodePtr root_;
};

}  // namespace ftprep
