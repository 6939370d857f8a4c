#pragma once

#include <algorithm>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "halfflat/scalar.hpp"

namespace halfflat {

/// Small dense row-major matrix over any scalar of the tower. Elimination
/// routines pivot on the largest magnitude; for rationals any nonzero pivot
/// is exact, for floats entries below `tol` (relative to the largest entry)
/// count as zero.
template <class S>
class Matrix {
public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols, S(0)) {}

  static Matrix identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = S(1);
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  S &operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  const S &operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  Matrix transpose() const {
    Matrix t(cols_, rows_);
    for (std::size_t r = 0; r < rows_; ++r)
      for (std::size_t c = 0; c < cols_; ++c) t(c, r) = (*this)(r, c);
    return t;
  }
  friend Matrix operator*(const Matrix &a, const Matrix &b) {
    if (a.cols_ != b.rows_) throw std::invalid_argument("matrix product shape");
    Matrix out(a.rows_, b.cols_);
    for (std::size_t i = 0; i < a.rows_; ++i)
      for (std::size_t k = 0; k < a.cols_; ++k) {
        if (is_zero(a(i, k))) continue;
        for (std::size_t j = 0; j < b.cols_; ++j) out(i, j) += a(i, k) * b(k, j);
      }
    return out;
  }
  friend Matrix operator+(Matrix a, const Matrix &b) {
    for (std::size_t i = 0; i < a.data_.size(); ++i) a.data_[i] += b.data_[i];
    return a;
  }
  friend Matrix operator-(Matrix a, const Matrix &b) {
    for (std::size_t i = 0; i < a.data_.size(); ++i) a.data_[i] -= b.data_[i];
    return a;
  }
  friend bool operator==(const Matrix &a, const Matrix &b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
  }
  friend Matrix operator*(Matrix a, const S &s) {
    for (S &x : a.data_) x *= s;
    return a;
  }
  std::vector<S> apply(const std::vector<S> &v) const {
    if (v.size() != cols_) throw std::invalid_argument("matrix-vector shape");
    std::vector<S> out(rows_, S(0));
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) out[i] += (*this)(i, j) * v[j];
    return out;
  }
  double max_abs() const {
    double m = 0.0;
    for (const S &x : data_) m = std::max(m, magnitude(x));
    return m;
  }

private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<S> data_;
};

namespace detail {

template <class S>
bool negligible(const S &x, double scale, double tol) {
  if constexpr (ScalarTraits<S>::exact) return is_zero(x);
  else return magnitude(x) <= tol * std::max(1.0, scale);
}

/// Reduced row echelon form in place; returns pivot columns.
template <class S>
std::vector<std::size_t> rref(Matrix<S> &m, double tol) {
  const double scale = m.max_abs();
  std::vector<std::size_t> pivots;
  std::size_t row = 0;
  for (std::size_t col = 0; col < m.cols() && row < m.rows(); ++col) {
    std::size_t best = row;
    double best_mag = -1.0;
    for (std::size_t r = row; r < m.rows(); ++r) {
      const double mag = magnitude(m(r, col));
      if (!is_zero(m(r, col)) && mag > best_mag) {
        best = r;
        best_mag = mag;
      }
    }
    if (best_mag < 0.0 || negligible(m(best, col), scale, tol)) {
      // clear numerically negligible entries so later rank decisions are stable
      if constexpr (!ScalarTraits<S>::exact)
        for (std::size_t r = row; r < m.rows(); ++r) m(r, col) = S(0);
      continue;
    }
    if (best != row)
      for (std::size_t c = 0; c < m.cols(); ++c) std::swap(m(best, c), m(row, c));
    const S inv = S(1) / m(row, col);
    for (std::size_t c = col; c < m.cols(); ++c) m(row, c) *= inv;
    for (std::size_t r = 0; r < m.rows(); ++r) {
      if (r == row || is_zero(m(r, col))) continue;
      const S f = m(r, col);
      for (std::size_t c = col; c < m.cols(); ++c) m(r, c) -= f * m(row, c);
    }
    pivots.push_back(col);
    ++row;
  }
  return pivots;
}

}  // namespace detail

/// Basis of {x : A x = 0}.
template <class S>
std::vector<std::vector<S>> kernel(Matrix<S> a, double tol = 1e-10) {
  const auto pivots = detail::rref(a, tol);
  std::vector<bool> is_pivot(a.cols(), false);
  for (auto p : pivots) is_pivot[p] = true;
  std::vector<std::vector<S>> basis;
  for (std::size_t free = 0; free < a.cols(); ++free) {
    if (is_pivot[free]) continue;
    std::vector<S> v(a.cols(), S(0));
    v[free] = S(1);
    for (std::size_t i = 0; i < pivots.size(); ++i) v[pivots[i]] = -a(i, free);
    basis.push_back(std::move(v));
  }
  return basis;
}

template <class S>
std::size_t rank(Matrix<S> a, double tol = 1e-10) {
  return detail::rref(a, tol).size();
}

/// Solves A x = b. Returns nullopt when the system is inconsistent; when the
/// solution is not unique, free variables are set to zero.
template <class S>
std::optional<std::vector<S>> solve(const Matrix<S> &a, const std::vector<S> &b, double tol = 1e-10) {
  if (b.size() != a.rows()) throw std::invalid_argument("solve: rhs length");
  Matrix<S> aug(a.rows(), a.cols() + 1);
  for (std::size_t r = 0; r < a.rows(); ++r) {
    for (std::size_t c = 0; c < a.cols(); ++c) aug(r, c) = a(r, c);
    aug(r, a.cols()) = b[r];
  }
  const double scale = aug.max_abs();
  const auto pivots = detail::rref(aug, tol);
  if (!pivots.empty() && pivots.back() == a.cols()) return std::nullopt;
  for (std::size_t r = pivots.size(); r < aug.rows(); ++r)
    if (!detail::negligible(aug(r, a.cols()), scale, tol * 100)) return std::nullopt;
  std::vector<S> x(a.cols(), S(0));
  for (std::size_t i = 0; i < pivots.size(); ++i) x[pivots[i]] = aug(i, a.cols());
  return x;
}

template <class S>
std::optional<Matrix<S>> inverse(const Matrix<S> &a, double tol = 1e-12) {
  if (a.rows() != a.cols()) throw std::invalid_argument("inverse: not square");
  const std::size_t n = a.rows();
  Matrix<S> aug(n, 2 * n);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < n; ++c) aug(r, c) = a(r, c);
    aug(r, n + r) = S(1);
  }
  const auto pivots = detail::rref(aug, tol);
  if (pivots.size() < n || pivots[n - 1] != n - 1) return std::nullopt;
  Matrix<S> inv(n, n);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < n; ++c) inv(r, c) = aug(r, n + c);
  return inv;
}

/// Determinant by elimination (no division-free tricks needed at these sizes).
template <class S>
S determinant(Matrix<S> a) {
  if (a.rows() != a.cols()) throw std::invalid_argument("determinant: not square");
  const std::size_t n = a.rows();
  S det(1);
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t best = n;
    double best_mag = -1.0;
    for (std::size_t r = col; r < n; ++r) {
      if (is_zero(a(r, col))) continue;
      const double mag = magnitude(a(r, col));
      if (mag > best_mag) {
        best = r;
        best_mag = mag;
      }
    }
    if (best == n) return S(0);
    if (best != col) {
      for (std::size_t c = 0; c < n; ++c) std::swap(a(best, c), a(col, c));
      det = -det;
    }
    det *= a(col, col);
    const S inv = S(1) / a(col, col);
    for (std::size_t r = col + 1; r < n; ++r) {
      if (is_zero(a(r, col))) continue;
      const S f = a(r, col) * inv;
      for (std::size_t c = col; c < n; ++c) a(r, c) -= f * a(col, c);
    }
  }
  return det;
}

}  // namespace halfflat
