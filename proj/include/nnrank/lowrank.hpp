#pragma once

// Exact nonnegative factorization with k = rank(T) for nonnegative matrices of
// rank at most two. In rank two the nonzero columns span a pointed planar cone;
// its two extreme rays are columns of T, so L = [y1 y2] and every column of T
// has nonnegative coordinates in that basis.

#include <array>
#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

#include "nnrank/error.hpp"
#include "nnrank/matcore.hpp"
#include "nnrank/nnfactor.hpp"

namespace nnrank {

/// Column indices of the extreme generators used by factor_rank_le2.
struct ExtremeColumns {
  std::size_t rank = 0;
  std::vector<std::size_t> columns;  // empty, {j}, or {clockwise, counterclockwise}
};

namespace detail {

inline Rational squared_norm(const ExactMatrix& t, std::size_t j) {
  Rational s = 0;
  for (std::size_t i = 0; i < t.rows(); ++i) s += t(i, j) * t(i, j);
  return s;
}

inline bool column_is_zero(const ExactMatrix& t, std::size_t j) {
  for (std::size_t i = 0; i < t.rows(); ++i)
    if (t(i, j) != 0) return false;
  return true;
}

// Coordinates of every column of a rank-2 matrix with respect to columns (u, v),
// using a pair of rows on which [u v] is invertible.
struct PlaneChart {
  std::size_t row_a = 0, row_b = 0;
  Rational det;

  static PlaneChart make(const ExactMatrix& t, std::size_t u, std::size_t v) {
    for (std::size_t a = 0; a < t.rows(); ++a)
      for (std::size_t b = a + 1; b < t.rows(); ++b) {
        Rational d = t(a, u) * t(b, v) - t(b, u) * t(a, v);
        if (d != 0) return {a, b, d};
      }
    fail(ErrorCode::precondition, "columns are not independent");
  }

  std::array<Rational, 2> coords(const ExactMatrix& t, std::size_t u, std::size_t v, std::size_t j) const {
    const Rational& x = t(row_a, j);
    const Rational& y = t(row_b, j);
    return {(x * t(row_b, v) - y * t(row_a, v)) / det, (t(row_a, u) * y - t(row_b, u) * x) / det};
  }
};

inline Rational cross(const std::array<Rational, 2>& p, const std::array<Rational, 2>& q) {
  return p[0] * q[1] - p[1] * q[0];
}

}  // namespace detail

/// Angularly extreme nonzero columns of a nonnegative matrix of rank <= 2.
/// Collinear candidates collapse to the one of largest norm (first on ties).
inline ExtremeColumns extreme_columns(const ExactMatrix& t) {
  require(t.nonnegative(), ErrorCode::domain, "matrix has a negative entry");
  ExtremeColumns out;
  out.rank = rank_exact(t);
  require(out.rank <= 2, ErrorCode::precondition,
          "rank " + std::to_string(out.rank) + " input: use the rank-three (exact3) path instead");

  std::vector<std::size_t> nonzero;
  for (std::size_t j = 0; j < t.cols(); ++j)
    if (!detail::column_is_zero(t, j)) nonzero.push_back(j);
  if (out.rank == 0) return out;
  if (out.rank == 1) {
    out.columns = {nonzero.front()};
    return out;
  }

  // basis from the first two independent columns
  const std::size_t u = nonzero.front();
  std::size_t v = u;
  for (std::size_t j : nonzero)
    if (rank_exact(t.select(identity_permutation(t.rows()), std::vector<std::size_t>{u, j})) == 2) {
      v = j;
      break;
    }
  const auto chart = detail::PlaneChart::make(t, u, v);

  auto better = [&](std::size_t current, std::size_t candidate, int orientation) {
    const Rational c = detail::cross(chart.coords(t, u, v, current), chart.coords(t, u, v, candidate));
    if (orientation * sgn(c) < 0) return true;
    if (c == 0) return detail::squared_norm(t, candidate) > detail::squared_norm(t, current);
    return false;
  };
  std::size_t clockwise = nonzero.front(), counterclockwise = nonzero.front();
  for (std::size_t j : nonzero) {
    if (better(clockwise, j, +1)) clockwise = j;
    if (better(counterclockwise, j, -1)) counterclockwise = j;
  }
  out.columns = {clockwise, counterclockwise};
  return out;
}

/// Exact witness with k = rank(T) for nonnegative T of rank <= 2.
inline ExactFactorization factor_rank_le2(const ExactMatrix& t) {
  const ExtremeColumns gen = extreme_columns(t);
  const std::size_t m = t.rows(), n = t.cols();
  if (gen.rank == 0) return ExactFactorization::zero(m, n);

  if (gen.rank == 1) {
    const std::size_t y = gen.columns.front();
    std::size_t pivot = 0;
    while (t(pivot, y) == 0) ++pivot;
    std::vector<Rational> coeff(n);
    for (std::size_t j = 0; j < n; ++j) coeff[j] = t(pivot, j) / t(pivot, y);
    return {ExactMatrix(m, 1, t.column(y)), ExactMatrix(1, n, std::move(coeff))};
  }

  const std::size_t y1 = gen.columns[0], y2 = gen.columns[1];
  const auto chart = detail::PlaneChart::make(t, y1, y2);
  std::vector<Rational> left(m * 2), right(2 * n);
  for (std::size_t i = 0; i < m; ++i) {
    left[i * 2] = t(i, y1);
    left[i * 2 + 1] = t(i, y2);
  }
  for (std::size_t j = 0; j < n; ++j) {
    auto c = chart.coords(t, y1, y2, j);
    right[j] = c[0];
    right[n + j] = c[1];
  }
  ExactFactorization f(ExactMatrix(m, 2, std::move(left)), ExactMatrix(2, n, std::move(right)));
  require(verify(t, f), ErrorCode::domain, "internal: rank-two witness failed exact verification");
  return f;
}

}  // namespace nnrank
