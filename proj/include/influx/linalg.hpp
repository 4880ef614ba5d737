#pragma once

// Dense matrices over a prime field (full-pivoting LU) and exact integer
// determinants and ranks (fraction-free elimination).

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <type_traits>
#include <utility>
#include <vector>

#include "influx/errors.hpp"
#include "influx/gf.hpp"

namespace influx {

template <class T>
class DenseMatrix {
 public:
  using value_type = T;

  DenseMatrix() = default;
  DenseMatrix(std::size_t rows, std::size_t cols, const T& fill = T()) : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool square() const noexcept { return rows_ == cols_; }

  T& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  const T& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  T* row(std::size_t r) { return data_.data() + r * cols_; }
  const T* row(std::size_t r) const { return data_.data() + r * cols_; }

  const std::vector<T>& data() const noexcept { return data_; }

  void swap_rows(std::size_t a, std::size_t b) {
    if (a == b) return;
    for (std::size_t c = 0; c < cols_; ++c) std::swap((*this)(a, c), (*this)(b, c));
  }
  void swap_cols(std::size_t a, std::size_t b) {
    if (a == b) return;
    for (std::size_t r = 0; r < rows_; ++r) std::swap((*this)(r, a), (*this)(r, b));
  }

  /// Submatrix on the given row and column index lists, in that order.
  DenseMatrix select(const std::vector<std::size_t>& rs, const std::vector<std::size_t>& cs) const {
    DenseMatrix out(rs.size(), cs.size());
    for (std::size_t i = 0; i < rs.size(); ++i)
      for (std::size_t j = 0; j < cs.size(); ++j) out(i, j) = (*this)(rs[i], cs[j]);
    return out;
  }

  friend bool operator==(const DenseMatrix&, const DenseMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<T> data_;
};

using IntMatrix = DenseMatrix<BigInt>;

template <PrimeField F>
using FieldMatrix = DenseMatrix<typename F::value_type>;

template <PrimeField F>
FieldMatrix<F> identity(const F& f, std::size_t n) {
  FieldMatrix<F> m(n, n, f.zero());
  for (std::size_t i = 0; i < n; ++i) m(i, i) = f.one();
  return m;
}

/// Maps an integer matrix into the field entrywise.
template <PrimeField F, class Int>
FieldMatrix<F> to_field(const F& f, const DenseMatrix<Int>& a) {
  FieldMatrix<F> out(a.rows(), a.cols(), f.zero());
  for (std::size_t r = 0; r < a.rows(); ++r)
    for (std::size_t c = 0; c < a.cols(); ++c) {
      if constexpr (std::is_same_v<Int, BigInt>)
        out(r, c) = f.from_big(a(r, c));
      else
        out(r, c) = f.from_int(std::int64_t(a(r, c)));
    }
  return out;
}

template <PrimeField F>
FieldMatrix<F> multiply(const F& f, const FieldMatrix<F>& a, const FieldMatrix<F>& b) {
  if (a.cols() != b.rows()) throw std::invalid_argument("multiply: dimension mismatch");
  FieldMatrix<F> out(a.rows(), b.cols(), f.zero());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const auto& aik = a(i, k);
      if (f.is_zero(aik)) continue;
      for (std::size_t j = 0; j < b.cols(); ++j) out(i, j) = f.add(out(i, j), f.mul(aik, b(k, j)));
    }
  return out;
}

/// P A Q = L U with full pivoting. Pivot search scans columns left to
/// right and, within a column, rows top to bottom.
template <PrimeField F>
class LuDecomposition {
 public:
  using value_type = typename F::value_type;

  LuDecomposition(const F& f, FieldMatrix<F> a) : f_(f), lu_(std::move(a)) {
    const std::size_t n = lu_.rows(), m = lu_.cols();
    row_perm_.resize(n);
    col_perm_.resize(m);
    for (std::size_t i = 0; i < n; ++i) row_perm_[i] = i;
    for (std::size_t j = 0; j < m; ++j) col_perm_[j] = j;
    const std::size_t steps = std::min(n, m);
    std::size_t k = 0;
    for (; k < steps; ++k) {
      std::size_t pr = n, pc = m;
      for (std::size_t c = k; c < m && pr == n; ++c)
        for (std::size_t r = k; r < n; ++r)
          if (!f_.is_zero(lu_(r, c))) {
            pr = r;
            pc = c;
            break;
          }
      if (pr == n) break;
      if (pr != k) {
        lu_.swap_rows(pr, k);
        std::swap(row_perm_[pr], row_perm_[k]);
        odd_ = !odd_;
      }
      if (pc != k) {
        lu_.swap_cols(pc, k);
        std::swap(col_perm_[pc], col_perm_[k]);
        odd_ = !odd_;
      }
      const value_type pivot_inv = f_.inv(lu_(k, k));
      const value_type* pivot_row = lu_.row(k);
      for (std::size_t i = k + 1; i < n; ++i) {
        value_type* ri = lu_.row(i);
        if (f_.is_zero(ri[k])) continue;
        const value_type l = f_.mul(ri[k], pivot_inv);
        ri[k] = l;
        for (std::size_t j = k + 1; j < m; ++j) ri[j] = f_.sub(ri[j], f_.mul(l, pivot_row[j]));
      }
    }
    rank_ = k;
    if (!singular()) {
      diag_inv_.resize(n);
      for (std::size_t i = 0; i < n; ++i) diag_inv_[i] = f_.inv(lu_(i, i));
    }
  }

  std::size_t rank() const noexcept { return rank_; }
  bool singular() const noexcept { return !lu_.square() || rank_ < lu_.rows(); }

  value_type det() const {
    if (!lu_.square()) throw std::invalid_argument("det of non-square matrix");
    if (singular()) return f_.zero();
    value_type d = f_.one();
    for (std::size_t i = 0; i < lu_.rows(); ++i) d = f_.mul(d, lu_(i, i));
    return odd_ ? f_.neg(d) : d;
  }

  /// Solves A x = b. Throws SingularMatrix when A is singular.
  std::vector<value_type> solve(const std::vector<value_type>& b) const {
    if (singular()) throw SingularMatrix();
    const std::size_t n = lu_.rows();
    if (b.size() != n) throw std::invalid_argument("solve: dimension mismatch");
    std::vector<value_type> y(n);
    for (std::size_t i = 0; i < n; ++i) y[i] = b[row_perm_[i]];
    forward_back(y, 0);
    std::vector<value_type> x(n);
    for (std::size_t i = 0; i < n; ++i) x[col_perm_[i]] = y[i];
    return x;
  }

  FieldMatrix<F> inverse() const {
    if (singular()) throw SingularMatrix();
    const std::size_t n = lu_.rows();
    FieldMatrix<F> inv(n, n, f_.zero());
    std::vector<value_type> y(n);
    for (std::size_t col = 0; col < n; ++col) {
      std::size_t first = n;
      for (std::size_t i = 0; i < n; ++i) {
        const bool hit = row_perm_[i] == col;
        y[i] = hit ? f_.one() : f_.zero();
        if (hit) first = i;
      }
      forward_back(y, first);
      for (std::size_t i = 0; i < n; ++i) inv(col_perm_[i], col) = y[i];
    }
    return inv;
  }

 private:
  // In place: L (unit lower) then U. Entries above `first` are zero on entry.
  void forward_back(std::vector<value_type>& y, std::size_t first) const {
    const std::size_t n = lu_.rows();
    for (std::size_t i = first + 1; i < n; ++i) {
      const value_type* ri = lu_.row(i);
      value_type acc = y[i];
      for (std::size_t k = first; k < i; ++k)
        if (!f_.is_zero(ri[k]) && !f_.is_zero(y[k])) acc = f_.sub(acc, f_.mul(ri[k], y[k]));
      y[i] = acc;
    }
    for (std::size_t i = n; i-- > 0;) {
      const value_type* ri = lu_.row(i);
      value_type acc = y[i];
      for (std::size_t k = i + 1; k < n; ++k)
        if (!f_.is_zero(ri[k]) && !f_.is_zero(y[k])) acc = f_.sub(acc, f_.mul(ri[k], y[k]));
      y[i] = f_.mul(acc, diag_inv_[i]);
    }
  }

  F f_;
  FieldMatrix<F> lu_;
  std::vector<std::size_t> row_perm_, col_perm_;
  std::vector<value_type> diag_inv_;
  std::size_t rank_ = 0;
  bool odd_ = false;
};

template <PrimeField F>
FieldMatrix<F> lu_invert(const F& f, const FieldMatrix<F>& a) {
  if (!a.square()) throw std::invalid_argument("lu_invert: matrix not square");
  return LuDecomposition<F>(f, a).inverse();
}

template <PrimeField F>
std::optional<FieldMatrix<F>> try_invert(const F& f, const FieldMatrix<F>& a) {
  LuDecomposition<F> lu(f, a);
  if (lu.singular()) return std::nullopt;
  return lu.inverse();
}

template <PrimeField F>
typename F::value_type det(const F& f, const FieldMatrix<F>& a) {
  return LuDecomposition<F>(f, a).det();
}

template <PrimeField F>
std::size_t rank(const F& f, const FieldMatrix<F>& a) {
  return LuDecomposition<F>(f, a).rank();
}

namespace detail {

template <class Int>
Int bareiss_square(DenseMatrix<Int> a) {
  const std::size_t n = a.rows();
  if (n == 0) return Int(1);
  bool negate = false;
  Int prev = 1;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    if (a(k, k) == 0) {
      std::size_t r = k + 1;
      while (r < n && a(r, k) == 0) ++r;
      if (r == n) return Int(0);
      a.swap_rows(k, r);
      negate = !negate;
    }
    for (std::size_t i = k + 1; i < n; ++i)
      for (std::size_t j = k + 1; j < n; ++j) a(i, j) = (a(i, j) * a(k, k) - a(i, k) * a(k, j)) / prev;
    prev = a(k, k);
  }
  return negate ? Int(-a(n - 1, n - 1)) : a(n - 1, n - 1);
}

// log2 of the Hadamard bound: every minor met during elimination is
// bounded by it in absolute value.
template <class Int>
double hadamard_log2(const DenseMatrix<Int>& a) {
  double total = 0;
  for (std::size_t r = 0; r < a.rows(); ++r) {
    double sq = 0;
    for (std::size_t c = 0; c < a.cols(); ++c) {
      const double v = static_cast<double>(a(r, c));
      sq += v * v;
    }
    if (sq == 0) return 0;
    total += 0.5 * std::log2(sq);
  }
  return total;
}

}  // namespace detail

/// Exact determinant by fraction-free elimination. Small inputs run on
/// 128-bit integers, larger ones on arbitrary precision.
template <class Int>
BigInt int_det_bareiss(const DenseMatrix<Int>& a) {
  if (!a.square()) throw std::invalid_argument("int_det_bareiss: matrix not square");
  if constexpr (std::is_integral_v<Int>) {
    if (detail::hadamard_log2(a) < 60) {
      DenseMatrix<__int128> w(a.rows(), a.cols());
      for (std::size_t r = 0; r < a.rows(); ++r)
        for (std::size_t c = 0; c < a.cols(); ++c) w(r, c) = a(r, c);
      const __int128 d = detail::bareiss_square(std::move(w));
      return d < 0 ? BigInt(-to_big(u128(-d))) : to_big(u128(d));
    }
  }
  IntMatrix w(a.rows(), a.cols());
  for (std::size_t r = 0; r < a.rows(); ++r)
    for (std::size_t c = 0; c < a.cols(); ++c) w(r, c) = BigInt(a(r, c));
  return detail::bareiss_square(std::move(w));
}

/// Exact rank over the rationals by fraction-free row reduction.
template <class Int>
std::size_t exact_rank(const DenseMatrix<Int>& a) {
  IntMatrix w(a.rows(), a.cols());
  for (std::size_t r = 0; r < a.rows(); ++r)
    for (std::size_t c = 0; c < a.cols(); ++c) w(r, c) = BigInt(a(r, c));
  const std::size_t n = w.rows(), m = w.cols();
  std::size_t rank = 0;
  BigInt prev = 1;
  for (std::size_t c = 0; c < m && rank < n; ++c) {
    std::size_t p = rank;
    while (p < n && w(p, c) == 0) ++p;
    if (p == n) continue;
    w.swap_rows(p, rank);
    for (std::size_t i = rank + 1; i < n; ++i) {
      for (std::size_t j = c + 1; j < m; ++j) w(i, j) = (w(i, j) * w(rank, c) - w(i, c) * w(rank, j)) / prev;
      w(i, c) = 0;
    }
    prev = w(rank, c);
    ++rank;
  }
  return rank;
}

}  // namespace influx
