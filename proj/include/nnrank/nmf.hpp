#pragma once

// Heuristic upper bounds on the nonnegative rank: multi-restart NMF that only
// reports success when it reaches an (almost) exact fit. A failed search is
// evidence, never a certificate.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>

#include "nnrank/error.hpp"
#include "nnrank/matcore.hpp"
#include "nnrank/matrix.hpp"
#include "nnrank/nnfactor.hpp"

namespace nnrank {

struct NmfOptions {
  std::size_t restarts = 64;
  std::uint64_t seed = 0;
  double fit_tol = 1e-9;
  std::size_t iters = 500;
};

struct NmfResult {
  std::size_t k = 0;
  std::optional<FloatFactorization> witness;
  /// Smallest max-entry residual over all restarts.
  double best_residual = std::numeric_limits<double>::infinity();
  /// Restart that produced the witness (or the best residual).
  std::size_t restart = 0;
  /// Restarts that fell back to multiplicative updates.
  std::size_t multiplicative_fallbacks = 0;
};

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Counter-based uniform draw in (0, 1], keyed by (seed, stream, counter).
inline double uniform_draw(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter) {
  const std::uint64_t key = splitmix64(seed ^ splitmix64(stream ^ 0xD1B54A32D192ED03ULL));
  const std::uint64_t bits = splitmix64(key + counter * 0x9E3779B97F4A7C15ULL);
  return static_cast<double>((bits >> 11) + 1) * 0x1.0p-53;
}

inline double max_entry_residual(const Eigen::MatrixXd& t, const Eigen::MatrixXd& w, const Eigen::MatrixXd& h) {
  return (t - w * h).cwiseAbs().maxCoeff();
}

// Equalizes column norms of W with row norms of H; leaves W*H unchanged.
inline void balance(Eigen::MatrixXd& w, Eigen::MatrixXd& h) {
  for (Eigen::Index l = 0; l < w.cols(); ++l) {
    const double a = w.col(l).norm(), b = h.row(l).norm();
    if (a <= 0.0 || b <= 0.0) continue;
    const double s = std::sqrt(b / a);
    w.col(l) *= s;
    h.row(l) /= s;
  }
}

// Projected Gauss-Seidel sweep over the rows of H for min ||T - W H||.
inline void gauss_seidel_rows(const Eigen::MatrixXd& t, const Eigen::MatrixXd& w, Eigen::MatrixXd& h) {
  const Eigen::MatrixXd gram = w.transpose() * w;
  const Eigen::MatrixXd rhs = w.transpose() * t;
  for (Eigen::Index l = 0; l < h.rows(); ++l) {
    const double d = gram(l, l);
    if (d <= 1e-300) continue;
    h.row(l) = (h.row(l) + (rhs.row(l) - gram.row(l) * h) / d).cwiseMax(0.0);
  }
}

inline void multiplicative_step(const Eigen::MatrixXd& t, Eigen::MatrixXd& w, Eigen::MatrixXd& h) {
  constexpr double eps = 1e-300;
  h = h.cwiseProduct((w.transpose() * t).cwiseQuotient((w.transpose() * w * h).array().max(eps).matrix()));
  w = w.cwiseProduct((t * h.transpose()).cwiseQuotient((w * h * h.transpose()).array().max(eps).matrix()));
}

}  // namespace detail

/// Searches for W (m x k), H (k x n) >= 0 with max-entry |W H - T| <= fit_tol.
inline NmfResult search_upper(const FloatMatrix& t, std::size_t k, const NmfOptions& opt = {}) {
  require(t.nonnegative(), ErrorCode::domain, "NMF needs a nonnegative matrix");
  require(k >= 1 && opt.restarts >= 1, ErrorCode::precondition, "NMF needs k >= 1 and at least one restart");
  require(opt.fit_tol > 0.0, ErrorCode::precondition, "fit_tol must be positive");

  NmfResult result;
  result.k = k;
  const auto m = static_cast<Eigen::Index>(t.rows()), n = static_cast<Eigen::Index>(t.cols());
  const auto kk = static_cast<Eigen::Index>(k);
  if (t.is_zero()) {
    result.best_residual = 0.0;
    result.witness = FloatFactorization(FloatMatrix(t.rows(), k), FloatMatrix(k, t.cols()));
    return result;
  }

  const Eigen::MatrixXd target = to_eigen(t);
  const double init_scale = std::sqrt(target.mean() / static_cast<double>(k));

  for (std::size_t restart = 0; restart < opt.restarts; ++restart) {
    Eigen::MatrixXd w(m, kk), h(kk, n);
    std::uint64_t counter = 0;
    for (Eigen::Index i = 0; i < m; ++i)
      for (Eigen::Index l = 0; l < kk; ++l) w(i, l) = init_scale * detail::uniform_draw(opt.seed, restart, counter++);
    for (Eigen::Index l = 0; l < kk; ++l)
      for (Eigen::Index j = 0; j < n; ++j) h(l, j) = init_scale * detail::uniform_draw(opt.seed, restart, counter++);

    bool multiplicative = false;
    double previous = (target - w * h).squaredNorm();
    double res = detail::max_entry_residual(target, w, h);
    for (std::size_t it = 0; it < opt.iters && res > opt.fit_tol; ++it) {
      if (multiplicative) {
        detail::multiplicative_step(target, w, h);
      } else {
        detail::gauss_seidel_rows(target, w, h);
        Eigen::MatrixXd wt = w.transpose();
        detail::gauss_seidel_rows(target.transpose(), h.transpose(), wt);
        w = wt.transpose();
        detail::balance(w, h);
        const double objective = (target - w * h).squaredNorm();
        if (!std::isfinite(objective) || objective > previous * (1.0 + 1e-12) + 1e-300) {
          multiplicative = true;
          ++result.multiplicative_fallbacks;
        }
        previous = objective;
      }
      res = detail::max_entry_residual(target, w, h);
    }

    if (res < result.best_residual) {
      result.best_residual = res;
      result.restart = restart;
    }
    if (res <= opt.fit_tol) {
      // Eigen defaults to column-major; Matrix is row-major
      Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> wr = w, hr = h;
      result.witness = FloatFactorization(FloatMatrix(t.rows(), k, std::vector<double>(wr.data(), wr.data() + wr.size())),
                                          FloatMatrix(k, t.cols(), std::vector<double>(hr.data(), hr.data() + hr.size())));
      result.restart = restart;
      return result;
    }
  }
  return result;
}

struct MinKResult {
  std::optional<std::size_t> k_best;
  std::optional<FloatFactorization> witness;
  /// best residual per k scanned, starting at k_lo
  std::vector<double> residuals;
};

/// Smallest k in [k_lo, k_hi] for which search_upper finds a fit (linear scan upward).
inline MinKResult min_k_search(const FloatMatrix& t, std::size_t k_lo, std::size_t k_hi, const NmfOptions& opt = {}) {
  require(k_lo <= k_hi, ErrorCode::precondition, "k_lo must not exceed k_hi");
  require(k_lo >= 1, ErrorCode::precondition, "k_lo must be at least 1");
  MinKResult out;
  for (std::size_t k = k_lo; k <= k_hi; ++k) {
    NmfResult r = search_upper(t, k, opt);
    out.residuals.push_back(r.best_residual);
    if (r.witness) {
      out.k_best = k;
      out.witness = std::move(r.witness);
      break;
    }
  }
  return out;
}

}  // namespace nnrank
