// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <stdexcept>

namespace ftprep {

using Amp = std::complex<double>;

inline constexpr int kMaxQubits = 14;
inline constexpr double kUnitaryTol = 1e-10;
inline constexpr double kHermitianTol = 1e-12;
inline constexpr double kDefaultPruneTol = 1e-15;
inline constexpr double kDefaultOutcomeFloor = 1e-300;

// Fixed-size complex matrices, row major. For two-qubit matrices the first
// operand qubit is the more significant bit of the local basis index, so the
// basis order for a pair (a, b) is |ab> = 00, 01, 10, 11.
struct Mat2 {
  std::array<Amp, 4> a{};

  Amp& operator()(int r, int c) { return a[static_cast<std::size_t>(r) * 2 + c]; }
  const Amp& operator()(int r, int c) const { return a[static_cast<std::size_t>(r) * 2 + c]; }

  Mat2 dagger() const {
    Mat2 d;
    for (int r = 0; r < 2; ++r)
      for (int c = 0; c < 2; ++c) d(r, c) = std::conj((*this)(c, r));
    return d;
  }

  friend Mat2 operator*(const Mat2& x, const Mat2& y) {
    Mat2 m;
    for (int r = 0; r < 2; ++r)
      for (int c = 0; c < 2; ++c) {
        Amp s = 0;
        for (int k = 0; k < 2; ++k) s += x(r, k) * y(k, c);
        m(r, c) = s;
      }
    return m;
  }

  bool is_unitary(double tol = kUnitaryTol) const {
    Mat2 p = (*this) * dagger();
    double err = 0;
    for (int r = 0; r < 2; ++r)
      for (int c = 0; c < 2; ++c) err = std::max(err, std::abs(p(r, c) - (r == c ? Amp{1, 0} : Amp{0, 0})));
    return err <= tol;
  }

  bool operator==(const Mat2&) const = default;
};

struct Mat4 {
  std::array<Amp, 16> a{};

  Amp& operator()(int r, int c) { return a[static_cast<std::size_t>(r) * 4 + c]; }
  const Amp& operator()(int r, int c) const { return a[static_cast<std::size_t>(r) * 4 + c]; }

  Mat4 dagger() const {
    Mat4 d;
    for (int r = 0; r < 4; ++r)
      for (int c = 0; c < 4; ++c) d(r, c) = std::conj((*this)(c, r));
    return d;
  }

  friend Mat4 operator*(const Mat4& x, const Mat4& y) {
    Mat4 m;
    for (int r = 0; r < 4; ++r)
      for (int c = 0; c < 4; ++c) {
        Amp s = 0;
        for (int k = 0; k < 4; ++k) s += x(r, k) * y(k, c);
        m(r, c) = s;
      }
    return m;
  }

  bool is_unitary(double tol = kUnitaryTol) const {
    Mat4 p = (*this) * dagger();
    double err = 0;
    for (int r = 0; r < 4; ++r)
      for (int c = 0; c < 4; ++c) err = std::max(err, std::abs(p(r, c) - (r == c ? Amp{1, 0} : Amp{0, 0})));
    return err <= tol;
  }

  // Swaps the roles of the two operand qubits: result acts on (b, a) as this
  // acts on (a, b).
  Mat4 swapped_operands() const {
    auto sw = [](int i) { return ((i & 1) << 1) | ((i >> 1) & 1); };
    Mat4 m;
    for (int r = 0; r < 4; ++r)
      for (int c = 0; c < 4; ++c) m(r, c) = (*this)(sw(r), sw(c));
    return m;
  }

  bool operator==(const Mat4&) const = default;
};

inline Mat4 kron(const Mat2& x, const Mat2& y) {
  Mat4 m;
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c) m(r, c) = x(r >> 1, c >> 1) * y(r & 1, c & 1);
  return m;
}

}  // namespace ftprep
