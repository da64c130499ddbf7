#pragma once

// Exact and floating rank, uniform periodic grids, the sampled kernel
// 1 + cos(s - t), and positive scaling / permutation transforms.

#include <Eigen/Dense>

#include <cmath>
#include <cstddef>
#include <numbers>
#include <numeric>
#include <span>
#include <vector>

#include "nnrank/error.hpp"
#include "nnrank/matrix.hpp"
#include "nnrank/rational.hpp"

namespace nnrank {

inline constexpr double two_pi = 2.0 * std::numbers::pi;
inline constexpr double default_rank_tol = 1e-8;

/// Rank over the rationals by fraction-free (Bareiss) elimination.
///
/// Rows are first cleared of denominators, so every intermediate value is an
/// integer minor of the scaled matrix and each division is exact.
inline std::size_t rank_exact(const ExactMatrix& m) {
  const std::size_t rows = m.rows(), cols = m.cols();
  std::vector<mpz_class> a(rows * cols);
  for (std::size_t i = 0; i < rows; ++i) {
    mpz_class lcm = 1;
    for (const auto& q : m.row(i)) mpz_lcm(lcm.get_mpz_t(), lcm.get_mpz_t(), q.get_den_mpz_t());
    for (std::size_t j = 0; j < cols; ++j) a[i * cols + j] = m(i, j).get_num() * (lcm / m(i, j).get_den());
  }
  auto at = [&](std::size_t i, std::size_t j) -> mpz_class& { return a[i * cols + j]; };

  mpz_class previous = 1;
  std::size_t rank = 0;
  for (std::size_t c = 0; c < cols && rank < rows; ++c) {
    std::size_t pivot = rank;
    while (pivot < rows && at(pivot, c) == 0) ++pivot;
    if (pivot == rows) continue;
    if (pivot != rank)
      for (std::size_t j = c; j < cols; ++j) std::swap(at(pivot, j), at(rank, j));
    const mpz_class p = at(rank, c);
    for (std::size_t i = rank + 1; i < rows; ++i) {
      const mpz_class lead = at(i, c);
      for (std::size_t j = c + 1; j < cols; ++j) {
        mpz_class v = p * at(i, j) - lead * at(rank, j);
        mpz_divexact(v.get_mpz_t(), v.get_mpz_t(), previous.get_mpz_t());
        at(i, j) = v;
      }
      at(i, c) = 0;
    }
    previous = p;
    ++rank;
  }
  return rank;
}

inline Eigen::MatrixXd to_eigen(const FloatMatrix& m) {
  Eigen::MatrixXd out(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) out(i, j) = m(i, j);
  return out;
}

/// Singular values in decreasing order.
inline std::vector<double> singular_values(const FloatMatrix& m) {
  if (m.empty()) return {};
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(to_eigen(m));
  const auto& s = svd.singularValues();
  return {s.data(), s.data() + s.size()};
}

/// Number of singular values above rel_tol times the largest one.
inline std::size_t rank_float(const FloatMatrix& m, double rel_tol = default_rank_tol) {
  require(rel_tol > 0.0, ErrorCode::precondition, "rel_tol must be positive");
  const auto s = singular_values(m);
  if (s.empty() || s.front() == 0.0) return 0;
  std::size_t rank = 0;
  for (double v : s)
    if (v > rel_tol * s.front()) ++rank;
  return rank;
}

/// Uniform left-closed periodic grid t_i = 2*pi*i/n + offset, offset in [0, 2*pi/n).
class GridSpec {
 public:
  explicit GridSpec(std::size_t n, double offset = 0.0) : n_(n), offset_(offset) {
    require(n >= 1, ErrorCode::precondition, "grid needs at least one point");
    require(std::isfinite(offset) && offset >= 0.0 && offset < spacing(), ErrorCode::precondition,
            "grid offset must lie in [0, 2*pi/n)");
  }

  std::size_t n() const noexcept { return n_; }
  double offset() const noexcept { return offset_; }
  double spacing() const noexcept { return two_pi / static_cast<double>(n_); }
  /// Quadrature weight of the uniform periodic rule.
  double weight() const noexcept { return spacing(); }
  double point(std::size_t i) const { return two_pi * static_cast<double>(i) / static_cast<double>(n_) + offset_; }

  std::vector<double> points() const {
    std::vector<double> t(n_);
    for (std::size_t i = 0; i < n_; ++i) t[i] = point(i);
    return t;
  }

 private:
  std::size_t n_;
  double offset_;
};

/// cos(2*pi*num/den). Exact at multiples of a quarter or sixth turn, where the
/// value is rational; otherwise evaluated after reduction to [0, pi].
inline double cos_of_turns(long long num, long long den) {
  require(den > 0, ErrorCode::precondition, "turn denominator must be positive");
  num %= den;
  if (num < 0) num += den;
  const long long g = std::gcd(num, den);
  num /= g;
  den /= g;
  if (den == 1) return 1.0;
  if (den == 2) return -1.0;
  if (den == 4) return 0.0;
  if (den == 3) return -0.5;
  if (den == 6) return (num == 1 || num == 5) ? 0.5 : -0.5;
  // cos is even: fold (pi, 2*pi) onto (0, pi)
  if (2 * num > den) num = den - num;
  return std::cos(two_pi * static_cast<double>(num) / static_cast<double>(den));
}

/// K(i, j) = 1 + cos(s_i - t_j) for the two grids.
inline FloatMatrix sample_kernel(const GridSpec& s_grid, const GridSpec& t_grid) {
  const auto ns = static_cast<long long>(s_grid.n());
  const auto nt = static_cast<long long>(t_grid.n());
  const bool same_offset = s_grid.offset() == t_grid.offset();
  std::vector<double> e(static_cast<std::size_t>(ns * nt));
  for (long long i = 0; i < ns; ++i)
    for (long long j = 0; j < nt; ++j) {
      const double c = same_offset ? cos_of_turns(i * nt - j * ns, ns * nt)
                                   : std::cos(s_grid.point(static_cast<std::size_t>(i)) -
                                              t_grid.point(static_cast<std::size_t>(j)));
      e[static_cast<std::size_t>(i * nt + j)] = std::clamp(1.0 + c, 0.0, 2.0);
    }
  return FloatMatrix(static_cast<std::size_t>(ns), static_cast<std::size_t>(nt), std::move(e));
}

/// Permutation given as an image list: position i takes element p[i].
using Permutation = std::vector<std::size_t>;

inline Permutation identity_permutation(std::size_t n) {
  Permutation p(n);
  std::iota(p.begin(), p.end(), std::size_t{0});
  return p;
}

inline bool is_permutation(std::span<const std::size_t> p) {
  std::vector<bool> seen(p.size(), false);
  for (auto i : p) {
    if (i >= p.size() || seen[i]) return false;
    seen[i] = true;
  }
  return true;
}

/// P_left * D_left * M * D_right * P_right, with (P_left M)(i, :) = M(p_left[i], :)
/// and (M P_right)(:, j) = M(:, p_right[j]).
template <class Scalar>
Matrix<Scalar> scale_and_permute(const Matrix<Scalar>& m, std::span<const Scalar> d_left,
                                 std::span<const Scalar> d_right, std::span<const std::size_t> p_left,
                                 std::span<const std::size_t> p_right) {
  require(d_left.size() == m.rows() && p_left.size() == m.rows(), ErrorCode::dimension,
          "left scaling/permutation size must equal the row count");
  require(d_right.size() == m.cols() && p_right.size() == m.cols(), ErrorCode::dimension,
          "right scaling/permutation size must equal the column count");
  for (const auto& d : d_left) require(d > 0, ErrorCode::precondition, "diagonal scaling entries must be positive");
  for (const auto& d : d_right) require(d > 0, ErrorCode::precondition, "diagonal scaling entries must be positive");
  require(is_permutation(p_left) && is_permutation(p_right), ErrorCode::precondition, "invalid permutation");

  std::vector<Scalar> e(m.size());
  for (std::size_t i = 0; i < m.rows(); ++i) {
    const std::size_t si = p_left[i];
    for (std::size_t j = 0; j < m.cols(); ++j) {
      const std::size_t sj = p_right[j];
      e[i * m.cols() + j] = d_left[si] * m(si, sj) * d_right[sj];
    }
  }
  return Matrix<Scalar>(m.rows(), m.cols(), std::move(e));
}

/// The 4x4 rank-three 0/1 matrix whose nonnegative rank is four.
inline ExactMatrix robbins_matrix() {
  return ExactMatrix{{1, 1, 0, 0}, {1, 0, 1, 0}, {0, 1, 0, 1}, {0, 0, 1, 1}};
}

}  // namespace nnrank
