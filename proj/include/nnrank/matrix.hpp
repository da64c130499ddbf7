#pragma once

// Dense row-major matrix value type, instantiated over exact rationals
// (ExactMatrix) and doubles (FloatMatrix). Values are immutable after
// construction; every "mutation" builds a new matrix.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "nnrank/error.hpp"
#include "nnrank/rational.hpp"

namespace nnrank {

template <class Scalar>
class Matrix {
 public:
  using value_type = Scalar;

  Matrix() = default;

  /// Zero matrix. Empty dimensions are allowed so that k = 0 witnesses can be represented.
  Matrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), entries_(rows * cols, Scalar(0)) {}

  Matrix(std::size_t rows, std::size_t cols, std::vector<Scalar> entries)
      : rows_(rows), cols_(cols), entries_(std::move(entries)) {
    require(entries_.size() == rows_ * cols_, ErrorCode::dimension,
            "entry count " + std::to_string(entries_.size()) + " does not match " + std::to_string(rows_) + "x" +
                std::to_string(cols_));
    normalize_entries();
    refresh_sign();
  }

  Matrix(std::initializer_list<std::initializer_list<Scalar>> rows) {
    rows_ = rows.size();
    cols_ = rows_ == 0 ? 0 : rows.begin()->size();
    entries_.reserve(rows_ * cols_);
    for (const auto& row : rows) {
      require(row.size() == cols_, ErrorCode::format, "ragged row in matrix literal");
      entries_.insert(entries_.end(), row.begin(), row.end());
    }
    normalize_entries();
    refresh_sign();
  }

  static Matrix identity(std::size_t n) {
    std::vector<Scalar> e(n * n, Scalar(0));
    for (std::size_t i = 0; i < n; ++i) e[i * n + i] = Scalar(1);
    return Matrix(n, n, std::move(e));
  }

  /// Diagonal matrix with the given entries.
  static Matrix diagonal(std::span<const Scalar> d) {
    const std::size_t n = d.size();
    std::vector<Scalar> e(n * n, Scalar(0));
    for (std::size_t i = 0; i < n; ++i) e[i * n + i] = d[i];
    return Matrix(n, n, std::move(e));
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t size() const noexcept { return entries_.size(); }
  bool empty() const noexcept { return entries_.empty(); }

  const Scalar& operator()(std::size_t i, std::size_t j) const { return entries_[i * cols_ + j]; }
  std::span<const Scalar> entries() const noexcept { return entries_; }
  std::span<const Scalar> row(std::size_t i) const { return {entries_.data() + i * cols_, cols_}; }

  std::vector<Scalar> column(std::size_t j) const {
    std::vector<Scalar> c(rows_);
    for (std::size_t i = 0; i < rows_; ++i) c[i] = (*this)(i, j);
    return c;
  }

  bool nonnegative() const noexcept { return nonnegative_; }
  bool is_zero() const noexcept { return zero_; }

  Matrix transpose() const {
    std::vector<Scalar> e(entries_.size());
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) e[j * rows_ + i] = (*this)(i, j);
    return Matrix(cols_, rows_, std::move(e));
  }

  /// Submatrix picking the listed rows and columns, in the listed order.
  Matrix select(std::span<const std::size_t> row_ids, std::span<const std::size_t> col_ids) const {
    std::vector<Scalar> e;
    e.reserve(row_ids.size() * col_ids.size());
    for (auto i : row_ids) {
      require(i < rows_, ErrorCode::dimension, "row index out of range");
      for (auto j : col_ids) {
        require(j < cols_, ErrorCode::dimension, "column index out of range");
        e.push_back((*this)(i, j));
      }
    }
    return Matrix(row_ids.size(), col_ids.size(), std::move(e));
  }

  friend bool operator==(const Matrix& a, const Matrix& b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.entries_ == b.entries_;
  }

 private:
  // exact entries are kept in canonical form
  void normalize_entries() {
    if constexpr (is_exact_v<Scalar>) {
      for (auto& x : entries_) x.canonicalize();
    } else {
      for (const auto& x : entries_) require(std::isfinite(x), ErrorCode::domain, "non-finite matrix entry");
    }
  }

  void refresh_sign() {
    nonnegative_ = std::all_of(entries_.begin(), entries_.end(), [](const Scalar& x) { return x >= 0; });
    zero_ = std::all_of(entries_.begin(), entries_.end(), [](const Scalar& x) { return x == 0; });
  }

  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<Scalar> entries_;
  bool nonnegative_ = true;
  bool zero_ = true;
};

using ExactMatrix = Matrix<Rational>;
using FloatMatrix = Matrix<double>;

template <class Scalar>
Matrix<Scalar> operator*(const Matrix<Scalar>& a, const Matrix<Scalar>& b) {
  require(a.cols() == b.rows(), ErrorCode::dimension,
          "cannot multiply " + std::to_string(a.rows()) + "x" + std::to_string(a.cols()) + " by " +
              std::to_string(b.rows()) + "x" + std::to_string(b.cols()));
  std::vector<Scalar> e(a.rows() * b.cols(), Scalar(0));
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t l = 0; l < a.cols(); ++l) {
      const Scalar& ail = a(i, l);
      if (ail == 0) continue;
      for (std::size_t j = 0; j < b.cols(); ++j) e[i * b.cols() + j] += ail * b(l, j);
    }
  return Matrix<Scalar>(a.rows(), b.cols(), std::move(e));
}

template <class Scalar>
Matrix<Scalar> operator+(const Matrix<Scalar>& a, const Matrix<Scalar>& b) {
  require(a.rows() == b.rows() && a.cols() == b.cols(), ErrorCode::dimension, "shape mismatch in matrix sum");
  std::vector<Scalar> e(a.entries().begin(), a.entries().end());
  for (std::size_t i = 0; i < e.size(); ++i) e[i] += b.entries()[i];
  return Matrix<Scalar>(a.rows(), a.cols(), std::move(e));
}

template <class Scalar>
Matrix<Scalar> operator-(const Matrix<Scalar>& a, const Matrix<Scalar>& b) {
  require(a.rows() == b.rows() && a.cols() == b.cols(), ErrorCode::dimension, "shape mismatch in matrix difference");
  std::vector<Scalar> e(a.entries().begin(), a.entries().end());
  for (std::size_t i = 0; i < e.size(); ++i) e[i] -= b.entries()[i];
  return Matrix<Scalar>(a.rows(), a.cols(), std::move(e));
}

/// [a | b]
template <class Scalar>
Matrix<Scalar> hstack(const Matrix<Scalar>& a, const Matrix<Scalar>& b) {
  require(a.rows() == b.rows(), ErrorCode::dimension, "row mismatch in horizontal concatenation");
  std::vector<Scalar> e;
  e.reserve(a.size() + b.size());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    auto ra = a.row(i);
    auto rb = b.row(i);
    e.insert(e.end(), ra.begin(), ra.end());
    e.insert(e.end(), rb.begin(), rb.end());
  }
  return Matrix<Scalar>(a.rows(), a.cols() + b.cols(), std::move(e));
}

/// [a ; b]
template <class Scalar>
Matrix<Scalar> vstack(const Matrix<Scalar>& a, const Matrix<Scalar>& b) {
  require(a.cols() == b.cols(), ErrorCode::dimension, "column mismatch in vertical concatenation");
  std::vector<Scalar> e(a.entries().begin(), a.entries().end());
  e.insert(e.end(), b.entries().begin(), b.entries().end());
  return Matrix<Scalar>(a.rows() + b.rows(), a.cols(), std::move(e));
}

inline FloatMatrix to_float(const ExactMatrix& m) {
  std::vector<double> e;
  e.reserve(m.size());
  for (const auto& q : m.entries()) e.push_back(to_double(q));
  return FloatMatrix(m.rows(), m.cols(), std::move(e));
}

inline const FloatMatrix& to_float(const FloatMatrix& m) { return m; }

/// Exact rational image of every (binary) float entry.
inline ExactMatrix to_exact(const FloatMatrix& m) {
  std::vector<Rational> e;
  e.reserve(m.size());
  for (double x : m.entries()) e.push_back(rational_from_double(x));
  return ExactMatrix(m.rows(), m.cols(), std::move(e));
}

/// Max-entry absolute difference, evaluated in double.
template <class A, class B>
double max_abs_difference(const Matrix<A>& a, const Matrix<B>& b) {
  require(a.rows() == b.rows() && a.cols() == b.cols(), ErrorCode::dimension, "shape mismatch");
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    worst = std::max(worst, std::fabs(to_double(a.entries()[i]) - to_double(b.entries()[i])));
  return worst;
}

/// Circulant matrix whose first row is `first_row`; row i is the first row rotated right by i.
template <class Scalar>
Matrix<Scalar> circulant(std::span<const Scalar> first_row) {
  const std::size_t n = first_row.size();
  std::vector<Scalar> e(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) e[i * n + j] = first_row[(j + n - i) % n];
  return Matrix<Scalar>(n, n, std::move(e));
}

template <class Scalar>
Matrix<Scalar> circulant(std::initializer_list<Scalar> first_row) {
  std::vector<Scalar> r(first_row);
  return circulant<Scalar>(std::span<const Scalar>(r));
}

}  // namespace nnrank
