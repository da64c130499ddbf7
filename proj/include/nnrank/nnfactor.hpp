#pragma once

// Nonnegative factorization witnesses T = L R and the transfer laws that
// build new witnesses from old ones (transpose, product, sum, sandwich).

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <utility>
#include <variant>

#include "nnrank/error.hpp"
#include "nnrank/matcore.hpp"
#include "nnrank/matrix.hpp"
#include "nnrank/matrix_io.hpp"

namespace nnrank {

inline constexpr double default_verify_tol = 1e-9;

/// Witness that rank+(T) <= k: entrywise nonnegative L (m x k) and R (k x n).
template <class Scalar>
class NonnegFactorization {
 public:
  NonnegFactorization(Matrix<Scalar> left, Matrix<Scalar> right)
      : left_(std::move(left)), right_(std::move(right)) {
    require(left_.cols() == right_.rows(), ErrorCode::dimension,
            "inner dimensions differ: L has " + std::to_string(left_.cols()) + " columns, R has " +
                std::to_string(right_.rows()) + " rows");
    require(left_.nonnegative() && right_.nonnegative(), ErrorCode::domain, "witness factors must be nonnegative");
  }

  /// Zero witness with inner dimension 0.
  static NonnegFactorization zero(std::size_t rows, std::size_t cols) {
    return {Matrix<Scalar>(rows, 0), Matrix<Scalar>(0, cols)};
  }

  const Matrix<Scalar>& left() const noexcept { return left_; }
  const Matrix<Scalar>& right() const noexcept { return right_; }
  std::size_t k() const noexcept { return left_.cols(); }
  std::size_t rows() const noexcept { return left_.rows(); }
  std::size_t cols() const noexcept { return right_.cols(); }

  Matrix<Scalar> product() const {
    if (k() == 0) return Matrix<Scalar>(rows(), cols());
    return left_ * right_;
  }

  friend bool operator==(const NonnegFactorization&, const NonnegFactorization&) = default;

 private:
  Matrix<Scalar> left_;
  Matrix<Scalar> right_;
};

using ExactFactorization = NonnegFactorization<Rational>;
using FloatFactorization = NonnegFactorization<double>;
using AnyFactorization = std::variant<ExactFactorization, FloatFactorization>;

inline std::size_t witness_k(const AnyFactorization& f) {
  return std::visit([](const auto& w) { return w.k(); }, f);
}

namespace detail {

inline FloatMatrix clamp_small_negatives(const FloatMatrix& m, double tol) {
  std::vector<double> e(m.entries().begin(), m.entries().end());
  for (double& x : e) {
    require(x >= -tol, ErrorCode::domain, "factor entry below -tol");
    if (x < 0.0) x = 0.0;
  }
  return FloatMatrix(m.rows(), m.cols(), std::move(e));
}

}  // namespace detail

/// Float witness from raw factors; entries in [-tol, 0) are clamped to zero.
inline FloatFactorization make_float_witness(const FloatMatrix& left, const FloatMatrix& right,
                                             double tol = default_verify_tol) {
  return {detail::clamp_small_negatives(left, tol), detail::clamp_small_negatives(right, tol)};
}

/// Max-entry residual |L R - T|, evaluated in double.
template <class S, class W>
double residual(const Matrix<S>& t, const NonnegFactorization<W>& f) {
  require(f.rows() == t.rows() && f.cols() == t.cols(), ErrorCode::dimension, "witness shape does not match matrix");
  return max_abs_difference(f.product(), t);
}

/// Exact check: L R == T entrywise (factors are nonnegative by construction).
inline bool verify(const ExactMatrix& t, const ExactFactorization& f) {
  require(f.rows() == t.rows() && f.cols() == t.cols(), ErrorCode::dimension, "witness shape does not match matrix");
  return f.product() == t;
}

/// Float check: max-entry |L R - T| <= tol.
template <class S>
bool verify(const Matrix<S>& t, const FloatFactorization& f, double tol = default_verify_tol) {
  return residual(t, f) <= tol;
}

/// Float check against raw (unclamped) factors: fails if any entry is below
/// -tol, otherwise judges the clamped witness.
template <class S>
bool verify_raw(const Matrix<S>& t, const FloatMatrix& left, const FloatMatrix& right,
                double tol = default_verify_tol) {
  require(left.rows() == t.rows() && right.cols() == t.cols() && left.cols() == right.rows(), ErrorCode::dimension,
          "witness shape does not match matrix");
  auto below = [tol](double x) { return x < -tol; };
  if (std::any_of(left.entries().begin(), left.entries().end(), below) ||
      std::any_of(right.entries().begin(), right.entries().end(), below))
    return false;
  return verify(t, make_float_witness(left, right, tol), tol);
}

/// Checks an exact witness exactly, a float witness at `tol`.
template <class S>
bool verify_any(const Matrix<S>& t, const AnyFactorization& f, double tol = default_verify_tol) {
  if (const auto* exact = std::get_if<ExactFactorization>(&f)) {
    if constexpr (is_exact_v<S>) {
      return verify(t, *exact);
    } else {
      return residual(t, *exact) <= tol;
    }
  }
  return verify(t, std::get<FloatFactorization>(f), tol);
}

struct RankBounds {
  std::size_t lower = 0;
  std::size_t upper = 0;
  /// ceil(6 min(m, n) / 7): a literature bound reported for information only.
  std::size_t reference_upper = 0;
};

namespace detail {

template <class S>
std::pair<std::size_t, std::size_t> nonzero_row_col_counts(const Matrix<S>& t) {
  std::size_t rows = 0, cols = 0;
  for (std::size_t i = 0; i < t.rows(); ++i) {
    auto r = t.row(i);
    if (std::any_of(r.begin(), r.end(), [](const S& x) { return x != 0; })) ++rows;
  }
  for (std::size_t j = 0; j < t.cols(); ++j) {
    for (std::size_t i = 0; i < t.rows(); ++i)
      if (t(i, j) != 0) {
        ++cols;
        break;
      }
  }
  return {rows, cols};
}

}  // namespace detail

/// rank(T) <= rank+(T) <= min(#nonzero rows, #nonzero columns) <= min(m, n).
template <class S>
RankBounds bounds(const Matrix<S>& t) {
  require(t.nonnegative(), ErrorCode::domain, "bounds require a nonnegative matrix");
  RankBounds b;
  if constexpr (is_exact_v<S>) {
    b.lower = rank_exact(t);
  } else {
    b.lower = rank_float(t);
  }
  const auto [rows, cols] = detail::nonzero_row_col_counts(t);
  b.upper = std::min(rows, cols);
  const std::size_t small = std::min(t.rows(), t.cols());
  b.reference_upper = (6 * small + 6) / 7;
  return b;
}

/// (L, R) for T  ->  (R^T, L^T) for T^T.
template <class S>
NonnegFactorization<S> transpose_witness(const NonnegFactorization<S>& f) {
  return {f.right().transpose(), f.left().transpose()};
}

/// Witness for B*A: (B L_A, R_A) when k_A <= k_B, else (L_B, R_B A).
template <class S>
NonnegFactorization<S> product_witness(const Matrix<S>& a, const NonnegFactorization<S>& fa, const Matrix<S>& b,
                                       const NonnegFactorization<S>& fb) {
  require(fa.rows() == a.rows() && fa.cols() == a.cols() && fb.rows() == b.rows() && fb.cols() == b.cols(),
          ErrorCode::dimension, "witness shape does not match its matrix");
  require(b.cols() == a.rows(), ErrorCode::dimension, "B*A requires cols(B) == rows(A)");
  require(a.nonnegative() && b.nonnegative(), ErrorCode::domain, "product witness needs nonnegative A and B");
  if (fa.k() <= fb.k()) {
    if (fa.k() == 0) return NonnegFactorization<S>::zero(b.rows(), a.cols());
    return {b * fa.left(), fa.right()};
  }
  if (fb.k() == 0) return NonnegFactorization<S>::zero(b.rows(), a.cols());
  return {fb.left(), fb.right() * a};
}

/// Witness for A + B: ([L_A | L_B], [R_A ; R_B]).
template <class S>
NonnegFactorization<S> sum_witness(const NonnegFactorization<S>& fa, const NonnegFactorization<S>& fb) {
  require(fa.rows() == fb.rows() && fa.cols() == fb.cols(), ErrorCode::dimension, "sum witness needs equal shapes");
  return {hstack(fa.left(), fb.left()), vstack(fa.right(), fb.right())};
}

/// Witness for B*T*A from a witness of T: (B L_T, R_T A).
template <class S>
NonnegFactorization<S> sandwich_witness(const NonnegFactorization<S>& ft, const Matrix<S>& a, const Matrix<S>& b) {
  require(b.cols() == ft.rows() && ft.cols() == a.rows(), ErrorCode::dimension, "B*T*A dimension chain is invalid");
  require(a.nonnegative() && b.nonnegative(), ErrorCode::domain, "sandwich witness needs nonnegative A and B");
  if (ft.k() == 0) return NonnegFactorization<S>::zero(b.rows(), a.cols());
  return {b * ft.left(), ft.right() * a};
}

/// The trivial witnesses (T, I) and (I, T) certify rank+(T) <= min(m, n).
template <class S>
NonnegFactorization<S> trivial_witness(const Matrix<S>& t) {
  require(t.nonnegative(), ErrorCode::domain, "trivial witness needs a nonnegative matrix");
  if (t.cols() <= t.rows()) return {t, Matrix<S>::identity(t.cols())};
  return {Matrix<S>::identity(t.rows()), t};
}

inline json to_json(const AnyFactorization& f) {
  return std::visit(
      [](const auto& w) { return json{{"k", w.k()}, {"L", to_json(w.left())}, {"R", to_json(w.right())}}; }, f);
}

template <class S>
json to_json(const NonnegFactorization<S>& f) {
  return to_json(AnyFactorization(f));
}

/// Parses {"k", "L", "R"}; both factors must share a scalar kind. Float
/// factors have entries in [-tol, 0) clamped.
inline AnyFactorization factorization_from_json(const json& j, double tol = default_verify_tol) {
  require(j.is_object() && j.contains("L") && j.contains("R"), ErrorCode::format,
          "factorization JSON needs 'L' and 'R'");
  AnyMatrix left = matrix_from_json(j["L"], true);
  AnyMatrix right = matrix_from_json(j["R"], true);
  require(left.index() == right.index(), ErrorCode::format, "L and R must share a scalar kind");
  if (j.contains("k")) {
    const std::size_t cols = std::visit([](const auto& m) { return m.cols(); }, left);
    require(j["k"].is_number_unsigned() && j["k"].get<std::size_t>() == cols, ErrorCode::format,
            "'k' does not match the factor shapes");
  }
  if (auto* l = std::get_if<ExactMatrix>(&left)) return ExactFactorization(*l, std::get<ExactMatrix>(right));
  return make_float_witness(std::get<FloatMatrix>(left), std::get<FloatMatrix>(right), tol);
}

}  // namespace nnrank
