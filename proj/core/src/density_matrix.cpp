// SPDX-License-Identifier: Apache-2.0
#include "ftprep/density_matrix.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

namespace ftprep {

namespace {

void dense_superop1(std::vector<Amp>& a, std::uint64_t dim, int shift, const QuadTree::Superop1& m) {
  const std::uint64_t bit = std::uint64_t{1} << shift;
  for (std::uint64_t r = 0; r < dim; ++r) {
    if (r & bit) continue;
    for (std::uint64_t c = 0; c < dim; ++c) {
      if (c & bit) continue;
      const std::array<std::size_t, 4> idx = {r * dim + c, r * dim + (c | bit), (r | bit) * dim + c,
                                              (r | bit) * dim + (c | bit)};
      std::array<Amp, 4> g;
      for (int i = 0; i < 4; ++i) g[i] = a[idx[i]];
      for (int k = 0; k < 4; ++k) {
        Amp s{};
        for (int i = 0; i < 4; ++i) s += m[static_cast<std::size_t>(k) * 4 + i] * g[i];
        a[idx[k]] = s;
      }
    }
  }
}

void dense_superop2(std::vector<Amp>& a, std::uint64_t dim, int shift1, int shift2,
                    const QuadTree::Superop2& m) {
  const std::uint64_t b1 = std::uint64_t{1} << shift1;
  const std::uint64_t b2 = std::uint64_t{1} << shift2;
  auto pos = [&](std::uint64_t base, int two_bits) {
    std::uint64_t p = base;
    if (two_bits & 2) p |= b1;
    if (two_bits & 1) p |= b2;
    return p;
  };
  for (std::uint64_t r = 0; r < dim; ++r) {
    if (r & (b1 | b2)) continue;
    for (std::uint64_t c = 0; c < dim; ++c) {
      if (c & (b1 | b2)) continue;
      std::array<Amp, 16> g;
      for (int I = 0; I < 4; ++I)
        for (int J = 0; J < 4; ++J) g[I * 4 + J] = a[pos(r, I) * dim + pos(c, J)];
      for (int K = 0; K < 4; ++K)
        for (int L = 0; L < 4; ++L) {
          Amp s{};
          const std::size_t base = (static_cast<std::size_t>(K) * 4 + L) * 16;
          for (int t = 0; t < 16; ++t) s += m[base + t] * g[t];
          a[pos(r, K) * dim + pos(c, L)] = s;
        }
    }
  }
}

}  // namespace

void KrausChannel::validate() const {
  if (terms.empty()) throw std::invalid_argument("KrausChannel: no terms");
  double total = 0;
  for (const Term& t : terms) {
    if (t.weight < 0) throw std::invalid_argument("KrausChannel: negative weight");
    if (!t.op.is_unitary()) throw std::invalid_argument("KrausChannel: non-unitary operator");
    total += t.weight;
  }
  if (std::abs(total - 1.0) > 1e-12) throw std::invalid_argument("KrausChannel: weights must sum to 1");
}

QuadTree::Superop1 superop_from_unitary(const Mat2& u) {
  QuadTree::Superop1 m{};
  for (int k = 0; k < 2; ++k)
    for (int l = 0; l < 2; ++l)
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
          m[static_cast<std::size_t>((k << 1) | l) * 4 + ((i << 1) | j)] = u(k, i) * std::conj(u(l, j));
  return m;
}

QuadTree::Superop1 superop_from_channel(const KrausChannel& ch) {
  QuadTree::Superop1 m{};
  for (const auto& t : ch.terms) {
    const QuadTree::Superop1 s = superop_from_unitary(t.op);
    for (std::size_t i = 0; i < m.size(); ++i) m[i] += t.weight * s[i];
  }
  return m;
}

QuadTree::Superop2 superop_from_unitary(const Mat4& u) {
  QuadTree::Superop2 m{};
  for (int K = 0; K < 4; ++K)
    for (int L = 0; L < 4; ++L)
      for (int I = 0; I < 4; ++I)
        for (int J = 0; J < 4; ++J)
          m[(static_cast<std::size_t>(K) * 4 + L) * 16 + I * 4 + J] = u(K, I) * std::conj(u(L, J));
  return m;
}

DensityMatrix::DensityMatrix(int num_qubits, Backend backend, SparseOptions opts)
    : num_qubits_(num_qubits), backend_(backend), opts_(opts) {
  if (num_qubits < 1 || num_qubits > kMaxQubits)
    throw std::invalid_argument("DensityMatrix: qubit count out of range [1, 14]");
  if (backend_ == Backend::kSparse) {
    tree_ = QuadTree(num_qubits, opts.leaf_side, opts.prune_tol);
  } else {
    dense_.assign(dim() * dim(), Amp{});
  }
}

DensityMatrix DensityMatrix::basis_state(int num_qubits, std::string_view label, Backend backend,
                                         SparseOptions opts) {
  DensityMatrix dm(num_qubits, backend, opts);
  if (static_cast<int>(label.size()) != num_qubits)
    throw std::invalid_argument("DensityMatrix: label length must equal qubit count");
  std::uint64_t idx = 0;
  for (char ch : label) {
    if (ch != '0' && ch != '1') throw std::invalid_argument("DensityMatrix: label must be binary");
    idx = (idx << 1) | static_cast<std::uint64_t>(ch - '0');
  }
  if (backend == Backend::kSparse)
    dm.tree_.set_element(idx, idx, Amp{1});
  else
    dm.dense_[idx * dm.dim() + idx] = Amp{1};
  return dm;
}

DensityMatrix DensityMatrix::from_state_vector(
    int num_qubits, const std::vector<std::pair<std::uint64_t, Amp>>& amplitudes, Backend backend,
    SparseOptions opts) {
  DensityMatrix dm(num_qubits, backend, opts);
  for (const auto& [i, a] : amplitudes)
    for (const auto& [j, b] : amplitudes) {
      const Amp v = a * std::conj(b);
      if (v == Amp{}) continue;
      if (backend == Backend::kSparse)
        dm.tree_.accumulate(i, j, v);
      else
        dm.dense_[i * dm.dim() + j] += v;
    }
  if (backend == Backend::kSparse) dm.tree_.prune();
  return dm;
}

void DensityMatrix::apply_superop1(int target, const QuadTree::Superop1& m) {
  if (target < 0 || target >= num_qubits_) throw std::invalid_argument("DensityMatrix: target out of range");
  if (backend_ == Backend::kSparse)
    tree_.apply_superop1(target, m);
  else
    dense_superop1(dense_, dim(), num_qubits_ - 1 - target, m);
}

void DensityMatrix::apply_superop2(int a, int b, const QuadTree::Superop2& m) {
  if (a < 0 || a >= num_qubits_ || b < 0 || b >= num_qubits_)
    throw std::invalid_argument("DensityMatrix: target out of range");
  if (a == b) throw std::invalid_argument("DensityMatrix: duplicate targets");
  if (backend_ == Backend::kSparse)
    tree_.apply_superop2(a, b, m);
  else
    dense_superop2(dense_, dim(), num_qubits_ - 1 - a, num_qubits_ - 1 - b, m);
}

void DensityMatrix::apply_one_qubit(int target, const Mat2& u) {
  if (!u.is_unitary()) throw std::invalid_argument("DensityMatrix: non-unitary 2x2 input");
  apply_superop1(target, superop_from_unitary(u));
}

void DensityMatrix::apply_two_qubit(int a, int b, const Mat4& u) {
  if (!u.is_unitary()) throw std::invalid_argument("DensityMatrix: non-unitary 4x4 input");
  if (a == b) throw std::invalid_argument("DensityMatrix: duplicate targets");
  if (a < b)
    apply_superop2(a, b, superop_from_unitary(u));
  else
    apply_superop2(b, a, superop_from_unitary(u.swapped_operands()));
}

void DensityMatrix::apply_channel(int target, const KrausChannel& ch) {
  ch.validate();
  apply_superop1(target, superop_from_channel(ch));
}

double DensityMatrix::trace() const {
  if (backend_ == Backend::kSparse) return tree_.trace();
  double s = 0;
  const std::uint64_t d = dim();
  for (std::uint64_t i = 0; i < d; ++i) s += dense_[i * d + i].real();
  return s;
}

double DensityMatrix::outcome_probability(int target, int outcome) const {
  if (target < 0 || target >= num_qubits_) throw std::invalid_argument("DensityMatrix: target out of range");
  if (outcome != 0 && outcome != 1) throw std::invalid_argument("DensityMatrix: outcome must be 0 or 1");
  const double tr = trace();
  if (tr <= 0) throw std::invalid_argument("DensityMatrix: non-positive trace");
  double kept = 0;
  if (backend_ == Backend::kSparse) {
    kept = tree_.trace_with_bit(target, outcome);
  } else {
    const std::uint64_t d = dim();
    const std::uint64_t bit = std::uint64_t{1} << (num_qubits_ - 1 - target);
    for (std::uint64_t i = 0; i < d; ++i)
      if (((i & bit) != 0) == (outcome != 0)) kept += dense_[i * d + i].real();
  }
  return kept / tr;
}

double DensityMatrix::measure_forced(int target, int outcome, double floor) {
  const double p = outcome_probability(target, outcome);
  if (p < floor) throw ImpossibleBranch(p);
  if (backend_ == Backend::kSparse) {
    tree_.project_bit(target, outcome);
    const double tr = tree_.trace();
    tree_.scale(Amp{1.0 / tr});
  } else {
    const std::uint64_t d = dim();
    const std::uint64_t bit = std::uint64_t{1} << (num_qubits_ - 1 - target);
    double tr = 0;
    for (std::uint64_t r = 0; r < d; ++r)
      for (std::uint64_t c = 0; c < d; ++c) {
        const bool keep = ((r & bit) != 0) == (outcome != 0) && ((c & bit) != 0) == (outcome != 0);
        if (!keep) dense_[r * d + c] = Amp{};
      }
    for (std::uint64_t i = 0; i < d; ++i) tr += dense_[i * d + i].real();
    for (Amp& v : dense_) v *= 1.0 / tr;
  }
  return p;
}

void DensityMatrix::reset_qubit(int target) {
  if (target < 0 || target >= num_qubits_) throw std::invalid_argument("DensityMatrix: target out of range");
  if (backend_ == Backend::kSparse) {
    tree_.reset_qubit(target);
    return;
  }
  const std::uint64_t d = dim();
  const std::uint64_t bit = std::uint64_t{1} << (num_qubits_ - 1 - target);
  std::vector<Amp> out(dense_.size(), Amp{});
  for (std::uint64_t r = 0; r < d; ++r) {
    if (r & bit) continue;
    for (std::uint64_t c = 0; c < d; ++c) {
      if (c & bit) continue;
      out[r * d + c] = dense_[r * d + c] + dense_[(r | bit) * d + (c | bit)];
    }
  }
  dense_ = std::move(out);
}

double DensityMatrix::overlap(const DensityMatrix& other) const {
  if (num_qubits_ != other.num_qubits_) throw std::invalid_argument("DensityMatrix: dimension mismatch");
  if (backend_ == Backend::kSparse && other.backend_ == Backend::kSparse &&
      tree_.leaf_side() == other.tree_.leaf_side()) {
    return tree_.dot_transpose(other.tree_).real();
  }
  // Mixed or geometry-mismatched: stream the sparser side.
  const DensityMatrix& a = (backend_ == Backend::kSparse) ? *this : other;
  const DensityMatrix& b = (backend_ == Backend::kSparse) ? other : *this;
  if (a.backend_ == Backend::kDense) {
    // both dense
    Amp s{};
    const std::uint64_t d = dim();
    for (std::uint64_t r = 0; r < d; ++r)
      for (std::uint64_t c = 0; c < d; ++c) s += a.dense_[r * d + c] * b.dense_[c * d + r];
    return s.real();
  }
  Amp s{};
  a.tree_.for_each_nonzero([&](std::uint64_t r, std::uint64_t c, Amp v) { s += v * b.element(c, r); });
  return s.real();
}

Amp DensityMatrix::element(std::uint64_t row, std::uint64_t col) const {
  if (backend_ == Backend::kSparse) return tree_.element(row, col);
  return dense_[row * dim() + col];
}

DensityMatrix DensityMatrix::to_dense() const {
  DensityMatrix out(num_qubits_, Backend::kDense, opts_);
  if (backend_ == Backend::kDense) {
    out.dense_ = dense_;
  } else {
    tree_.to_dense(out.dense_);
  }
  return out;
}

DensityMatrix DensityMatrix::to_sparse(SparseOptions opts) const {
  DensityMatrix out(num_qubits_, Backend::kSparse, opts);
  if (backend_ == Backend::kSparse) {
    tree_.for_each_nonzero([&](std::uint64_t r, std::uint64_t c, Amp v) { out.tree_.accumulate(r, c, v); });
  } else {
    const std::uint64_t d = dim();
    for (std::uint64_t r = 0; r < d; ++r)
      for (std::uint64_t c = 0; c < d; ++c)
        if (dense_[r * d + c] != Amp{}) out.tree_.accumulate(r, c, dense_[r * d + c]);
  }
  out.tree_.prune();
  return out;
}

DensityMatrix DensityMatrix::trace_out_tail(int num_tail) const {
  if (num_tail < 0 || num_tail >= num_qubits_) throw std::invalid_argument("DensityMatrix: bad tail size");
  if (num_tail == 0) return *this;
  const int keep = num_qubits_ - num_tail;
  DensityMatrix out(keep, backend_, opts_);
  const std::uint64_t tail_mask = (std::uint64_t{1} << num_tail) - 1;
  auto emit = [&](std::uint64_t r, std::uint64_t c, Amp v) {
    if ((r & tail_mask) != (c & tail_mask)) return;
    if (out.backend_ == Backend::kSparse)
      out.tree_.accumulate(r >> num_tail, c >> num_tail, v);
    else
      out.dense_[(r >> num_tail) * out.dim() + (c >> num_tail)] += v;
  };
  if (backend_ == Backend::kSparse) {
    tree_.for_each_nonzero(emit);
    out.tree_.prune();
  } else {
    const std::uint64_t d = dim();
    for (std::uint64_t r = 0; r < d; ++r)
      for (std::uint64_t c = 0; c < d; ++c)
        if (dense_[r * d + c] != Amp{}) emit(r, c, dense_[r * d + c]);
  }
  return out;
}

std::size_t DensityMatrix::nonzero_count() const {
  if (backend_ == Backend::kSparse) return tree_.nonzero_count();
  std::size_t n = 0;
  for (Amp v : dense_)
    if (v != Amp{}) ++n;
  return n;
}

std::size_t DensityMatrix::approx_bytes() const {
  if (backend_ == Backend::kSparse) return tree_.approx_bytes();
  return dense_.capacity() * sizeof(Amp);
}

const QuadTree& DensityMatrix::tree() const {
  if (backend_ != Backend::kSparse) throw std::logic_error("DensityMatrix: dense state has no tree");
  return tree_;
}

bool DensityMatrix::is_hermitian(double tol) const {
  if (backend_ == Backend::kSparse) return tree_.is_hermitian(tol);
  const std::uint64_t d = dim();
  for (std::uint64_t r = 0; r < d; ++r)
    for (std::uint64_t c = r; c < d; ++c)
      if (std::abs(dense_[r * d + c] - std::conj(dense_[c * d + r])) > tol) return false;
  return true;
}

double DensityMatrix::max_abs_diff(const DensityMatrix& a, const DensityMatrix& b) {
  if (a.num_qubits_ != b.num_qubits_) throw std::invalid_argument("DensityMatrix: dimension mismatch");
  if (a.backend_ == Backend::kSparse && b.backend_ == Backend::kSparse &&
      a.tree_.leaf_side() == b.tree_.leaf_side())
    return QuadTree::max_abs_diff(a.tree_, b.tree_);
  const std::uint64_t d = a.dim();
  double mx = 0;
  for (std::uint64_t r = 0; r < d; ++r)
    for (std::uint64_t c = 0; c < d; ++c) mx = std::max(mx, std::abs(a.element(r, c) - b.element(r, c)));
  return mx;
}

void DensityMatrix::dump_nonzeros(std::ostream& os) const {
  struct Entry {
    std::uint64_t r, c;
    Amp v;
  };
  std::vector<Entry> entries;
  if (backend_ == Backend::kSparse) {
    tree_.for_each_nonzero([&](std::uint64_t r, std::uint64_t c, Amp v) { entries.push_back({r, c, v}); });
  } else {
    const std::uint64_t d = dim();
    for (std::uint64_t r = 0; r < d; ++r)
      for (std::uint64_t c = 0; c < d; ++c)
        if (dense_[r * d + c] != Amp{}) entries.push_back({r, c, dense_[r * d + c]});
  }
  std::sort(entries.begin(), entries.end(),
            [](const Entry& a, const Entry& b) { return a.r != b.r ? a.r < b.r : a.c < b.c; });
  char buf[128];
  for (const Entry& e : entries) {
    std::snprintf(buf, sizeof(buf), "%llu %llu %.17g %.17g\n", static_cast<unsigned long long>(e.r),
                  static_cast<unsigned long long>(e.c), e.v.real(), e.v.imag());
    os << buf;
  }
}

}  // namespace ftprep
