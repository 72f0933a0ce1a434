// SPDX-License-Identifier: Apache-2.0
#include "ftprep/quadtree.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>

namespace ftprep {

namespace {

bool power_of_two(std::uint64_t v) { return v != 0 && (v & (v - 1)) == 0; }

void check_finite(Amp v) {
  if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
    throw std::runtime_error("QuadTree: non-finite amplitude encountered");
}

}  // namespace

QuadTree::QuadTree(int num_qubits, std::uint32_t leaf_side, double prune_tol)
    : num_qubits_(num_qubits), prune_tol_(prune_tol) {
  if (num_qubits < 1 || num_qubits > kMaxQubits)
    throw std::invalid_argument("QuadTree: qubit count out of range [1, 14]");
  if (!power_of_two(leaf_side)) throw std::invalid_argument("QuadTree: leaf side must be a power of two");
  if (prune_tol < 0) throw std::invalid_argument("QuadTree: negative prune tolerance");
  dim_ = std::uint64_t{1} << num_qubits;
  leaf_side_ = static_cast<std::uint32_t>(std::min<std::uint64_t>(leaf_side, dim_));
  levels_ = num_qubits - std::countr_zero(std::uint64_t{leaf_side_});
}

QuadTree::QuadTree(const QuadTree& other)
    : num_qubits_(other.num_qubits_),
      dim_(other.dim_),
      leaf_side_(other.leaf_side_),
      levels_(other.levels_),
      prune_tol_(other.prune_tol_),
      root_(other.clone_node(other.root_.get())) {}

QuadTree& QuadTree::operator=(const QuadTree& other) {
  if (this == &other) return *this;
  num_qubits_ = other.num_qubits_;
  dim_ = other.dim_;
  leaf_side_ = other.leaf_side_;
  levels_ = other.levels_;
  prune_tol_ = other.prune_tol_;
  root_ = other.clone_node(other.root_.get());
  return *this;
}

QuadTree::NodePtr QuadTree::make_leaf() const {
  auto n = std::make_unique<Node>();
  n->tile.assign(std::size_t{leaf_side_} * leaf_side_, Amp{});
  return n;
}

QuadTree::NodePtr QuadTree::clone_node(const Node* n) const {
  if (!n) return nullptr;
  auto out = std::make_unique<Node>();
  out->tile = n->tile;
  for (int i = 0; i < 4; ++i) out->child[i] = clone_node(n->child[i].get());
  return out;
}

// ---------------------------------------------------------------------------
// element access

void QuadTree::set_element(std::uint64_t row, std::uint64_t col, Amp v) {
  accumulate(row, col, v - element(row, col));
}

void QuadTree::accumulate(std::uint64_t row, std::uint64_t col, Amp v) {
  if (row >= dim_ || col >= dim_) throw std::invalid_argument("QuadTree: index out of range");
  if (v == Amp{}) return;
  check_finite(v);
  if (!root_) root_ = levels_ == 0 ? make_leaf() : std::make_unique<Node>();
  Node* n = root_.get();
  for (int d = 0; d < levels_; ++d) {
    const int shift = num_qubits_ - 1 - d;
    const int pos = static_cast<int>(((row >> shift) & 1) << 1 | ((col >> shift) & 1));
    if (!n->child[pos]) n->child[pos] = (d + 1 == levels_) ? make_leaf() : std::make_unique<Node>();
    n = n->child[pos].get();
  }
  const std::uint64_t mask = leaf_side_ - 1;
  n->tile[(row & mask) * leaf_side_ + (col & mask)] += v;
}

Amp QuadTree::element(std::uint64_t row, std::uint64_t col) const {
  if (row >= dim_ || col >= dim_) throw std::invalid_argument("QuadTree: index out of range");
  const Node* n = root_.get();
  for (int d = 0; d < levels_ && n; ++d) {
    const int shift = num_qubits_ - 1 - d;
    n = n->child[((row >> shift) & 1) << 1 | ((col >> shift) & 1)].get();
  }
  if (!n) return Amp{};
  const std::uint64_t mask = leaf_side_ - 1;
  return n->tile[(row & mask) * leaf_side_ + (col & mask)];
}

// ---------------------------------------------------------------------------
// pruning and scaling

// Keeps the tile if any element's 1-norm reaches the tolerance. The 1-norm
// upper-bounds the magnitude, so pruning stays conservative: a removed tile
// truly had every |element| below the tolerance. The negated comparison keeps
// NaN tiles alive so they surface through trace checks and validate().
QuadTree::NodePtr QuadTree::prune_leaf(NodePtr n) const {
  for (const Amp& v : n->tile)
    if (!(std::abs(v.real()) + std::abs(v.imag()) < prune_tol_)) return n;
  return nullptr;
}

QuadTree::NodePtr QuadTree::prune_rec(NodePtr n, int depth) const {
  if (!n) return nullptr;
  if (n->is_leaf()) return prune_leaf(std::move(n));
  bool any = false;
  for (int i = 0; i < 4; ++i) {
    n->child[i] = prune_rec(std::move(n->child[i]), depth + 1);
    any = any || n->child[i] != nullptr;
  }
  return any ? std::move(n) : nullptr;
}

void QuadTree::prune() { root_ = prune_rec(std::move(root_), 0); }

QuadTree::NodePtr QuadTree::scale_node(NodePtr n, Amp f) const {
  if (!n) return nullptr;
  if (n->is_leaf()) {
    for (Amp& v : n->tile) v *= f;
    return prune_leaf(std::move(n));
  }
  bool any = false;
  for (int i = 0; i < 4; ++i) {
    n->child[i] = scale_node(std::move(n->child[i]), f);
    any = any || n->child[i] != nullptr;
  }
  return any ? std::move(n) : nullptr;
}

QuadTree::NodePtr QuadTree::clone_scaled(const Node* n, Amp f) const {
  if (!n) return nullptr;
  auto out = std::make_unique<Node>();
  if (n->is_leaf()) {
    out->tile.resize(n->tile.size());
    for (std::size_t i = 0; i < n->tile.size(); ++i) out->tile[i] = n->tile[i] * f;
    return prune_leaf(std::move(out));
  }
  bool any = false;
  for (int i = 0; i < 4; ++i) {
    out->child[i] = clone_scaled(n->child[i].get(), f);
    any = any || out->child[i] != nullptr;
  }
  return any ? std::move(out) : nullptr;
}

void QuadTree::scale(Amp f) {
  if (f == Amp{}) {
    root_.reset();
    return;
  }
  root_ = scale_node(std::move(root_), f);
}

QuadTree::NodePtr QuadTree::lin_comb(const TermList& terms, int depth) const {
  if (terms.n == 0) return nullptr;
  if (depth == levels_) {
    auto out = make_leaf();
    for (int k = 0; k < terms.n; ++k) {
      const auto& [a, n] = terms.t[static_cast<std::size_t>(k)];
      for (std::size_t i = 0; i < out->tile.size(); ++i) out->tile[i] += a * n->tile[i];
    }
    return prune_leaf(std::move(out));
  }
  auto out = std::make_unique<Node>();
  bool any = false;
  for (int pos = 0; pos < 4; ++pos) {
    TermList sub;
    for (int k = 0; k < terms.n; ++k) {
      const auto& [a, n] = terms.t[static_cast<std::size_t>(k)];
      sub.add(a, n->child[pos].get());
    }
    out->child[pos] = lin_comb(sub, depth + 1);
    any = any || out->child[pos] != nullptr;
  }
  return any ? std::move(out) : nullptr;
}

// ---------------------------------------------------------------------------
// one-qubit superoperators

// Mixes four sibling quadrants: out[K] = sum_I m[K*4+I] * in[I]. Inputs are
// owned; single-use unit-coefficient terms are moved, which makes Pauli and
// CNOT conjugations pure pointer shuffles.
std::array<QuadTree::NodePtr, 4> QuadTree::mix4(std::array<NodePtr, 4> in, const Superop1& m,
                                                int child_depth) const {
  struct Term {
    Amp coeff;
    int input;
  };
  std::array<std::vector<Term>, 4> terms;
  std::array<int, 4> single_uses{};
  for (int k = 0; k < 4; ++k)
    for (int i = 0; i < 4; ++i) {
      const Amp c = m[static_cast<std::size_t>(k) * 4 + i];
      if (c != Amp{} && in[i]) terms[k].push_back({c, i});
    }
  for (int k = 0; k < 4; ++k)
    if (terms[k].size() == 1) ++single_uses[terms[k][0].input];

  std::array<NodePtr, 4> out;
  // Multi-term outputs read the inputs, so they are built before any moves.
  for (int k = 0; k < 4; ++k) {
    if (terms[k].size() < 2) continue;
    TermList lc;
    for (const Term& t : terms[k]) lc.add(t.coeff, in[t.input].get());
    out[k] = lin_comb(lc, child_depth);
  }
  for (int k = 0; k < 4; ++k) {
    if (terms[k].size() != 1) continue;
    const Term& t = terms[k][0];
    if (--single_uses[t.input] == 0) {
      out[k] = t.coeff == Amp{1} ? std::move(in[t.input]) : scale_node(std::move(in[t.input]), t.coeff);
    } else {
      out[k] = clone_scaled(in[t.input].get(), t.coeff);
    }
  }
  return out;
}

void QuadTree::tile_superop1(std::vector<Amp>& tile, int shift, const Superop1& m) const {
  const std::uint64_t L = leaf_side_;
  const std::uint64_t bit = std::uint64_t{1} << shift;
  for (std::uint64_t r = 0; r < L; ++r) {
    if (r & bit) continue;
    for (std::uint64_t c = 0; c < L; ++c) {
      if (c & bit) continue;
      const std::array<std::size_t, 4> idx = {
          r * L + c, r * L + (c | bit), (r | bit) * L + c, (r | bit) * L + (c | bit)};
      std::array<Amp, 4> g;
      for (int i = 0; i < 4; ++i) g[i] = tile[idx[i]];
      for (int k = 0; k < 4; ++k) {
        Amp s{};
        for (int i = 0; i < 4; ++i) s += m[static_cast<std::size_t>(k) * 4 + i] * g[i];
        tile[idx[k]] = s;
      }
    }
  }
}

std::pair<QuadTree::NodePtr, QuadTree::NodePtr> QuadTree::pair_mix(NodePtr a, NodePtr b, Amp maa,
                                                                   Amp mab, Amp mba, Amp mbb,
                                                                   int depth) const {
  if (!a && !b) return {nullptr, nullptr};
  if (a && !b) {
    NodePtr out_b = clone_scaled(a.get(), mba);
    return {scale_node(std::move(a), maa), std::move(out_b)};
  }
  if (!a && b) {
    NodePtr out_a = clone_scaled(b.get(), mab);
    return {std::move(out_a), scale_node(std::move(b), mbb)};
  }
  if (a->is_leaf()) {
    for (std::size_t i = 0; i < a->tile.size(); ++i) {
      const Amp x = a->tile[i], y = b->tile[i];
      a->tile[i] = maa * x + mab * y;
      b->tile[i] = mba * x + mbb * y;
    }
    return {prune_leaf(std::move(a)), prune_leaf(std::move(b))};
  }
  bool any_a = false, any_b = false;
  for (int pos = 0; pos < 4; ++pos) {
    auto [ca, cb] = pair_mix(std::move(a->child[pos]), std::move(b->child[pos]), maa, mab, mba, mbb,
                             depth + 1);
    a->child[pos] = std::move(ca);
    b->child[pos] = std::move(cb);
    any_a = any_a || a->child[pos] != nullptr;
    any_b = any_b || b->child[pos] != nullptr;
  }
  if (!any_a) a.reset();
  if (!any_b) b.reset();
  return {std::move(a), std::move(b)};
}

namespace {

// Channels built from diagonal and bit-flip Paulis mix only the (0,0)/(1,1)
// quadrant pair and scale the off-diagonal quadrants.
bool diag_pair_pattern(const QuadTree::Superop1& m) {
  static constexpr bool allowed[16] = {true, false, false, true,  false, true, false, false,
                                       false, false, true, false, true,  false, false, true};
  for (int i = 0; i < 16; ++i)
    if (!allowed[i] && m[static_cast<std::size_t>(i)] != Amp{}) return false;
  return true;
}

}  // namespace

QuadTree::NodePtr QuadTree::superop1_rec(NodePtr n, int depth, int qubit, const Superop1& m) const {
  if (!n) return nullptr;
  if (n->is_leaf()) {
    tile_superop1(n->tile, tile_shift(qubit), m);
    return prune_leaf(std::move(n));
  }
  if (depth == qubit) {
    bool any = false;
    if (diag_pair_pattern(m)) {
      auto [c00, c11] = pair_mix(std::move(n->child[0]), std::move(n->child[3]), m[0], m[3], m[12],
                                 m[15], depth + 1);
      n->child[0] = std::move(c00);
      n->child[3] = std::move(c11);
      n->child[1] = scale_node(std::move(n->child[1]), m[1 * 4 + 1]);
      n->child[2] = scale_node(std::move(n->child[2]), m[2 * 4 + 2]);
      for (int i = 0; i < 4; ++i) any = any || n->child[i] != nullptr;
      return any ? std::move(n) : nullptr;
    }
    auto mixed = mix4(std::move(n->child), m, depth + 1);
    for (int i = 0; i < 4; ++i) {
      n->child[i] = std::move(mixed[i]);
      any = any || n->child[i] != nullptr;
    }
    return any ? std::move(n) : nullptr;
  }
  bool any = false;
  for (int i = 0; i < 4; ++i) {
    n->child[i] = superop1_rec(std::move(n->child[i]), depth + 1, qubit, m);
    any = any || n->child[i] != nullptr;
  }
  return any ? std::move(n) : nullptr;
}

void QuadTree::apply_superop1(int qubit, const Superop1& m) {
  if (qubit < 0 || qubit >= num_qubits_) throw std::invalid_argument("QuadTree: qubit out of range");
  root_ = superop1_rec(std::move(root_), 0, qubit, m);
}

// ---------------------------------------------------------------------------
// two-qubit superoperators

void QuadTree::tile_superop2(std::vector<Amp>& tile, int shift1, int shift2, const Superop2& m) const {
  const std::uint64_t L = leaf_side_;
  const std::uint64_t b1 = std::uint64_t{1} << shift1;
  const std::uint64_t b2 = std::uint64_t{1} << shift2;
  auto pos = [&](std::uint64_t base, int two_bits) {
    std::uint64_t p = base;
    if (two_bits & 2) p |= b1;
    if (two_bits & 1) p |= b2;
    return p;
  };
  for (std::uint64_t r = 0; r < L; ++r) {
    if (r & (b1 | b2)) continue;
    for (std::uint64_t c = 0; c < L; ++c) {
      if (c & (b1 | b2)) continue;
      std::array<Amp, 16> g;
      for (int I = 0; I < 4; ++I)
        for (int J = 0; J < 4; ++J) g[I * 4 + J] = tile[pos(r, I) * L + pos(c, J)];
      for (int K = 0; K < 4; ++K)
        for (int Lc = 0; Lc < 4; ++Lc) {
          Amp s{};
          const std::size_t base = (static_cast<std::size_t>(K) * 4 + Lc) * 16;
          for (int t = 0; t < 16; ++t) s += m[base + t] * g[t];
          tile[pos(r, K) * L + pos(c, Lc)] = s;
        }
    }
  }
}

// Parents are the four quadrants at qubit q1's depth, indexed by
// (row_bit_q1 << 1) | col_bit_q1; their children at qubit q2's depth complete
// the 16 inputs. Outputs follow the same layout.
std::array<QuadTree::NodePtr, 4> QuadTree::mix16(std::array<NodePtr, 4> parents, const Superop2& m,
                                                 int child_depth) const {
  // inputs[(i1<<1)|j1][(i2<<1)|j2]
  std::array<std::array<NodePtr, 4>, 4> in;
  for (int p = 0; p < 4; ++p) {
    if (parents[p]) in[p] = std::move(parents[p]->child);
  }
  struct Term {
    Amp coeff;
    int p, ch;
  };
  std::array<std::array<std::vector<Term>, 4>, 4> terms;  // [out_p][out_ch]
  std::array<std::array<int, 4>, 4> single_uses{};
  for (int K = 0; K < 4; ++K)
    for (int Lc = 0; Lc < 4; ++Lc) {
      const int k1 = K >> 1, k2 = K & 1, l1 = Lc >> 1, l2 = Lc & 1;
      const int op = (k1 << 1) | l1, och = (k2 << 1) | l2;
      for (int I = 0; I < 4; ++I)
        for (int J = 0; J < 4; ++J) {
          const Amp c = m[(static_cast<std::size_t>(K) * 4 + Lc) * 16 + I * 4 + J];
          if (c == Amp{}) continue;
          const int ip = ((I >> 1) << 1) | (J >> 1), ich = ((I & 1) << 1) | (J & 1);
          if (in[ip][ich]) terms[op][och].push_back({c, ip, ich});
        }
    }
  for (int p = 0; p < 4; ++p)
    for (int ch = 0; ch < 4; ++ch)
      if (terms[p][ch].size() == 1) {
        const Term& t = terms[p][ch][0];
        ++single_uses[t.p][t.ch];
      }

  std::array<std::array<NodePtr, 4>, 4> out;
  for (int p = 0; p < 4; ++p)
    for (int ch = 0; ch < 4; ++ch) {
      if (terms[p][ch].size() < 2) continue;
      TermList lc;
      for (const Term& t : terms[p][ch]) lc.add(t.coeff, in[t.p][t.ch].get());
      out[p][ch] = lin_comb(lc, child_depth + 1);
    }
  for (int p = 0; p < 4; ++p)
    for (int ch = 0; ch < 4; ++ch) {
      if (terms[p][ch].size() != 1) continue;
      const Term& t = terms[p][ch][0];
      if (--single_uses[t.p][t.ch] == 0) {
        out[p][ch] =
            t.coeff == Amp{1} ? std::move(in[t.p][t.ch]) : scale_node(std::move(in[t.p][t.ch]), t.coeff);
      } else {
        out[p][ch] = clone_scaled(in[t.p][t.ch].get(), t.coeff);
      }
    }

  std::array<NodePtr, 4> result;
  for (int p = 0; p < 4; ++p) {
    bool any = false;
    for (int ch = 0; ch < 4; ++ch) any = any || out[p][ch] != nullptr;
    if (!any) continue;
    auto node = std::make_unique<Node>();
    node->child = std::move(out[p]);
    result[p] = std::move(node);
  }
  return result;
}

std::array<QuadTree::NodePtr, 4> QuadTree::mix_tiles_q2(std::array<NodePtr, 4> parents, int shift2,
                                                        const Superop2& m) const {
  const std::uint64_t L = leaf_side_;
  const std::uint64_t b2 = std::uint64_t{1} << shift2;
  std::array<NodePtr, 4> out;
  bool any_in = false;
  for (auto& p : parents) any_in = any_in || p != nullptr;
  if (!any_in) return out;
  for (int p = 0; p < 4; ++p) out[p] = make_leaf();
  auto in_at = [&](int p, std::uint64_t r, std::uint64_t c) -> Amp {
    return parents[p] ? parents[p]->tile[r * L + c] : Amp{};
  };
  for (std::uint64_t r = 0; r < L; ++r) {
    if (r & b2) continue;
    for (std::uint64_t c = 0; c < L; ++c) {
      if (c & b2) continue;
      std::array<Amp, 16> g;  // [(I,J)] with I=(i1 i2), J=(j1 j2)
      for (int I = 0; I < 4; ++I)
        for (int J = 0; J < 4; ++J) {
          const int ip = ((I >> 1) << 1) | (J >> 1);
          g[I * 4 + J] = in_at(ip, r | ((I & 1) ? b2 : 0), c | ((J & 1) ? b2 : 0));
        }
      for (int K = 0; K < 4; ++K)
        for (int Lc = 0; Lc < 4; ++Lc) {
          Amp s{};
          const std::size_t base = (static_cast<std::size_t>(K) * 4 + Lc) * 16;
          for (int t = 0; t < 16; ++t) s += m[base + t] * g[t];
          const int op = ((K >> 1) << 1) | (Lc >> 1);
          out[op]->tile[(r | ((K & 1) ? b2 : 0)) * L + (c | ((Lc & 1) ? b2 : 0))] = s;
        }
    }
  }
  for (int p = 0; p < 4; ++p) out[p] = prune_leaf(std::move(out[p]));
  return out;
}

std::array<QuadTree::NodePtr, 4> QuadTree::walk4(std::array<NodePtr, 4> cur, int depth, int q2,
                                                 const Superop2& m) const {
  bool any = false;
  for (auto& c : cur) any = any || c != nullptr;
  if (!any) return {};
  if (depth == levels_) return mix_tiles_q2(std::move(cur), tile_shift(q2), m);
  if (depth == q2) return mix16(std::move(cur), m, depth);

  std::array<NodePtr, 4> out;
  std::array<std::array<NodePtr, 4>, 4> out_children;  // [parent][pos]
  for (int pos = 0; pos < 4; ++pos) {
    std::array<NodePtr, 4> sub;
    for (int p = 0; p < 4; ++p)
      if (cur[p]) sub[p] = std::move(cur[p]->child[pos]);
    auto r = walk4(std::move(sub), depth + 1, q2, m);
    for (int p = 0; p < 4; ++p) out_children[p][pos] = std::move(r[p]);
  }
  for (int p = 0; p < 4; ++p) {
    bool has = false;
    for (int pos = 0; pos < 4; ++pos) has = has || out_children[p][pos] != nullptr;
    if (!has) continue;
    auto node = std::make_unique<Node>();
    node->child = std::move(out_children[p]);
    out[p] = std::move(node);
  }
  return out;
}

QuadTree::NodePtr QuadTree::superop2_rec(NodePtr n, int depth, int q1, int q2, const Superop2& m) const {
  if (!n) return nullptr;
  if (n->is_leaf()) {
    tile_superop2(n->tile, tile_shift(q1), tile_shift(q2), m);
    return prune_leaf(std::move(n));
  }
  if (depth == q1) {
    auto mixed = walk4(std::move(n->child), depth + 1, q2, m);
    bool any = false;
    for (int i = 0; i < 4; ++i) {
      n->child[i] = std::move(mixed[i]);
      any = any || n->child[i] != nullptr;
    }
    return any ? std::move(n) : nullptr;
  }
  bool any = false;
  for (int i = 0; i < 4; ++i) {
    n->child[i] = superop2_rec(std::move(n->child[i]), depth + 1, q1, q2, m);
    any = any || n->child[i] != nullptr;
  }
  return any ? std::move(n) : nullptr;
}

void QuadTree::apply_superop2(int qubit_a, int qubit_b, const Superop2& m) {
  if (qubit_a < 0 || qubit_a >= num_qubits_ || qubit_b < 0 || qubit_b >= num_qubits_)
    throw std::invalid_argument("QuadTree: qubit out of range");
  if (qubit_a == qubit_b) throw std::invalid_argument("QuadTree: duplicate qubit operands");
  if (qubit_a > qubit_b) throw std::invalid_argument("QuadTree: superop2 expects qubit_a < qubit_b");
  root_ = superop2_rec(std::move(root_), 0, qubit_a, qubit_b, m);
}

// ---------------------------------------------------------------------------
// projection, reset, traces

QuadTree::NodePtr QuadTree::project_rec(NodePtr n, int depth, int qubit, int outcome) const {
  if (!n) return nullptr;
  if (n->is_leaf()) {
    const std::uint64_t L = leaf_side_;
    const std::uint64_t bit = std::uint64_t{1} << tile_shift(qubit);
    for (std::uint64_t r = 0; r < L; ++r)
      for (std::uint64_t c = 0; c < L; ++c) {
        const bool keep = ((r & bit) != 0) == (outcome != 0) && ((c & bit) != 0) == (outcome != 0);
        if (!keep) n->tile[r * L + c] = Amp{};
      }
    return prune_leaf(std::move(n));
  }
  if (depth == qubit) {
    const int keep = (outcome << 1) | outcome;
    for (int i = 0; i < 4; ++i)
      if (i != keep) n->child[i].reset();
    return n->child[keep] ? std::move(n) : nullptr;
  }
  bool any = false;
  for (int i = 0; i < 4; ++i) {
    n->child[i] = project_rec(std::move(n->child[i]), depth + 1, qubit, outcome);
    any = any || n->child[i] != nullptr;
  }
  return any ? std::move(n) : nullptr;
}

void QuadTree::project_bit(int qubit, int outcome) {
  if (qubit < 0 || qubit >= num_qubits_) throw std::invalid_argument("QuadTree: qubit out of range");
  root_ = project_rec(std::move(root_), 0, qubit, outcome);
}

QuadTree::NodePtr QuadTree::reset_rec(NodePtr n, int depth, int qubit) const {
  if (!n) return nullptr;
  if (n->is_leaf()) {
    const std::uint64_t L = leaf_side_;
    const std::uint64_t bit = std::uint64_t{1} << tile_shift(qubit);
    std::vector<Amp> out(n->tile.size(), Amp{});
    for (std::uint64_t r = 0; r < L; ++r) {
      if (r & bit) continue;
      for (std::uint64_t c = 0; c < L; ++c) {
        if (c & bit) continue;
        out[r * L + c] = n->tile[r * L + c] + n->tile[(r | bit) * L + (c | bit)];
      }
    }
    n->tile = std::move(out);
    return prune_leaf(std::move(n));
  }
  if (depth == qubit) {
    TermList lc;
    lc.add(Amp{1}, n->child[0].get());
    lc.add(Amp{1}, n->child[3].get());
    NodePtr merged = lin_comb(lc, depth + 1);
    for (int i = 0; i < 4; ++i) n->child[i].reset();
    n->child[0] = std::move(merged);
    return n->child[0] ? std::move(n) : nullptr;
  }
  bool any = false;
  for (int i = 0; i < 4; ++i) {
    n->child[i] = reset_rec(std::move(n->child[i]), depth + 1, qubit);
    any = any || n->child[i] != nullptr;
  }
  return any ? std::move(n) : nullptr;
}

void QuadTree::reset_qubit(int qubit) {
  if (qubit < 0 || qubit >= num_qubits_) throw std::invalid_argument("QuadTree: qubit out of range");
  root_ = reset_rec(std::move(root_), 0, qubit);
}

double QuadTree::trace_rec(const Node* n, int depth) const {
  if (!n) return 0;
  if (n->is_leaf()) {
    double s = 0;
    for (std::uint64_t i = 0; i < leaf_side_; ++i) s += n->tile[i * leaf_side_ + i].real();
    return s;
  }
  return trace_rec(n->child[0].get(), depth + 1) + trace_rec(n->child[3].get(), depth + 1);
}

double QuadTree::trace() const { return trace_rec(root_.get(), 0); }

double QuadTree::trace_bit_rec(const Node* n, int depth, int qubit, int outcome) const {
  if (!n) return 0;
  if (n->is_leaf()) {
    const std::uint64_t bit = std::uint64_t{1} << tile_shift(qubit);
    double s = 0;
    for (std::uint64_t i = 0; i < leaf_side_; ++i)
      if (((i & bit) != 0) == (outcome != 0)) s += n->tile[i * leaf_side_ + i].real();
    return s;
  }
  if (depth == qubit) {
    const int keep = (outcome << 1) | outcome;
    return trace_rec(n->child[keep].get(), depth + 1);
  }
  return trace_bit_rec(n->child[0].get(), depth + 1, qubit, outcome) +
         trace_bit_rec(n->child[3].get(), depth + 1, qubit, outcome);
}

double QuadTree::trace_with_bit(int qubit, int outcome) const {
  if (qubit < 0 || qubit >= num_qubits_) throw std::invalid_argument("QuadTree: qubit out of range");
  return trace_bit_rec(root_.get(), 0, qubit, outcome);
}

// ---------------------------------------------------------------------------
// comparisons and reductions

Amp QuadTree::dot_transpose(const QuadTree& other) const {
  if (num_qubits_ != other.num_qubits_ || leaf_side_ != other.leaf_side_)
    throw std::invalid_argument("QuadTree: geometry mismatch in dot_transpose");
  struct R {
    std::uint32_t L;
    Amp operator()(const Node* a, const Node* b) const {
      if (!a || !b) return Amp{};
      if (a->is_leaf()) {
        Amp s{};
        for (std::uint64_t r = 0; r < L; ++r)
          for (std::uint64_t c = 0; c < L; ++c) s += a->tile[r * L + c] * b->tile[c * L + r];
        return s;
      }
      Amp s{};
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
          s += (*this)(a->child[(i << 1) | j].get(), b->child[(j << 1) | i].get());
      return s;
    }
  };
  return R{leaf_side_}(root_.get(), other.root_.get());
}

bool QuadTree::is_hermitian(double tol) const {
  struct R {
    std::uint32_t L;
    double tol;
    bool operator()(const Node* a, const Node* b) const {  // b is at the transposed block
      if (!a && !b) return true;
      if (!a || !b) {
        // one side truncated: the other must be all below tol
        const Node* n = a ? a : b;
        return max_of(n) <= tol;
      }
      if (a->is_leaf()) {
        for (std::uint64_t r = 0; r < L; ++r)
          for (std::uint64_t c = 0; c < L; ++c)
            if (std::abs(a->tile[r * L + c] - std::conj(b->tile[c * L + r])) > tol) return false;
        return true;
      }
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
          if (!(*this)(a->child[(i << 1) | j].get(), b->child[(j << 1) | i].get())) return false;
      return true;
    }
    static double max_of(const Node* n) {
      if (!n) return 0;
      double mx = 0;
      if (n->is_leaf()) {
        for (Amp v : n->tile) mx = std::max(mx, std::abs(v));
        return mx;
      }
      for (const auto& c : n->child) mx = std::max(mx, max_of(c.get()));
      return mx;
    }
  };
  return R{leaf_side_, tol}(root_.get(), root_.get());
}

double QuadTree::max_abs() const {
  struct R {
    static double go(const Node* n) {
      if (!n) return 0;
      double mx = 0;
      if (n->is_leaf()) {
        for (Amp v : n->tile) mx = std::max(mx, std::abs(v));
        return mx;
      }
      for (const auto& c : n->child) mx = std::max(mx, go(c.get()));
      return mx;
    }
  };
  return R::go(root_.get());
}

double QuadTree::max_abs_diff(const QuadTree& a, const QuadTree& b) {
  if (a.num_qubits_ != b.num_qubits_ || a.leaf_side_ != b.leaf_side_)
    throw std::invalid_argument("QuadTree: geometry mismatch in max_abs_diff");
  struct R {
    std::uint32_t L;
    double operator()(const Node* x, const Node* y) const {
      if (!x && !y) return 0;
      if (x && y && x->is_leaf()) {
        double mx = 0;
        for (std::size_t i = 0; i < x->tile.size(); ++i) mx = std::max(mx, std::abs(x->tile[i] - y->tile[i]));
        return mx;
      }
      if (!x || !y) {
        const Node* n = x ? x : y;
        double mx = 0;
        if (n->is_leaf()) {
          for (Amp v : n->tile) mx = std::max(mx, std::abs(v));
          return mx;
        }
        for (const auto& c : n->child) mx = std::max(mx, (*this)(c.get(), nullptr));
        return mx;
      }
      double mx = 0;
      for (int i = 0; i < 4; ++i) mx = std::max(mx, (*this)(x->child[i].get(), y->child[i].get()));
      return mx;
    }
  };
  return R{a.leaf_side_}(a.root_.get(), b.root_.get());
}

void QuadTree::for_each_nonzero(const std::function<void(std::uint64_t, std::uint64_t, Amp)>& fn) const {
  struct R {
    std::uint32_t L;
    const std::function<void(std::uint64_t, std::uint64_t, Amp)>& fn;
    void go(const Node* n, std::uint64_t row, std::uint64_t col, std::uint64_t half) const {
      if (!n) return;
      if (n->is_leaf()) {
        for (std::uint64_t r = 0; r < L; ++r)
          for (std::uint64_t c = 0; c < L; ++c) {
            const Amp v = n->tile[r * L + c];
            if (v != Amp{}) fn(row + r, col + c, v);
          }
        return;
      }
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
          go(n->child[(i << 1) | j].get(), row + (i ? half : 0), col + (j ? half : 0), half >> 1);
    }
  };
  R{leaf_side_, fn}.go(root_.get(), 0, 0, dim_ >> 1);
}

std::size_t QuadTree::nonzero_count() const {
  std::size_t n = 0;
  for_each_nonzero([&](std::uint64_t, std::uint64_t, Amp) { ++n; });
  return n;
}

std::size_t QuadTree::node_count() const {
  struct R {
    static std::size_t go(const Node* n) {
      if (!n) return 0;
      std::size_t s = 1;
      for (const auto& c : n->child) s += go(c.get());
      return s;
    }
  };
  return R::go(root_.get());
}

std::size_t QuadTree::approx_bytes() const {
  struct R {
    static std::size_t go(const Node* n) {
      if (!n) return 0;
      std::size_t s = sizeof(Node) + n->tile.capacity() * sizeof(Amp);
      for (const auto& c : n->child) s += go(c.get());
      return s;
    }
  };
  return R::go(root_.get());
}

std::vector<std::string> QuadTree::structure_violations() const {
  std::vector<std::string> out;
  struct R {
    const QuadTree* t;
    std::vector<std::string>& out;
    void go(const Node* n, int depth) const {
      if (!n) return;
      if (n->is_leaf()) {
        if (depth != t->levels_) out.push_back("leaf at depth " + std::to_string(depth));
        if (n->tile.size() != std::size_t{t->leaf_side_} * t->leaf_side_) out.push_back("bad tile size");
        bool keepable = false;
        for (Amp v : n->tile) {
          if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
            out.push_back("non-finite amplitude at depth " + std::to_string(depth));
          if (!(std::abs(v.real()) + std::abs(v.imag()) < t->prune_tol_)) keepable = true;
        }
        if (!keepable) out.push_back("retained all-subthreshold tile at depth " + std::to_string(depth));
        return;
      }
      if (depth >= t->levels_) {
        out.push_back("internal node at leaf depth");
        return;
      }
      bool any = false;
      for (const auto& c : n->child) any = any || c != nullptr;
      if (!any) out.push_back("childless internal node at depth " + std::to_string(depth));
      for (const auto& c : n->child) go(c.get(), depth + 1);
    }
  };
  R{this, out}.go(root_.get(), 0);
  return out;
}

void QuadTree::to_dense(std::vector<Amp>& out) const {
  out.assign(dim_ * dim_, Amp{});
  for_each_nonzero([&](std::uint64_t r, std::uint64_t c, Amp v) { out[r * dim_ + c] = v; });
}

QuadTree QuadTree::from_dense(const std::vector<Amp>& flat, int num_qubits, std::uint32_t leaf_side,
                              double prune_tol) {
  QuadTree t(num_qubits, leaf_side, prune_tol);
  if (flat.size() != t.dim_ * t.dim_) throw std::invalid_argument("QuadTree: dense size mismatch");
  for (std::uint64_t r = 0; r < t.dim_; ++r)
    for (std::uint64_t c = 0; c < t.dim_; ++c) {
      const Amp v = flat[r * t.dim_ + c];
      if (v != Amp{}) t.accumulate(r, c, v);
    }
  t.prune();
  return t;
}

}  // namespace ftprep
