#pragma once

// The integral operator (S f)(s) = int_0^{2 pi} f(t) (1 + cos(s - t)) dt on
// sampled periodic functions: its three moment functionals, the ice-cream cone
// {c >= sqrt(a^2 + b^2)} of moment triples, nonnegative Poisson-kernel
// preimages of interior points, and nonnegative ranks of the discretized
// kernel matrices.

#include <cmath>
#include <cstddef>
#include <cstdio>
#include <numbers>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "nnrank/error.hpp"
#include "nnrank/matcore.hpp"
#include "nnrank/nmf.hpp"
#include "nnrank/rank3geo.hpp"

namespace nnrank {

class GridFunction {
 public:
  GridFunction(GridSpec grid, std::vector<double> values) : grid_(grid), values_(std::move(values)) {
    require(values_.size() == grid_.n(), ErrorCode::dimension, "grid function length does not match the grid");
    for (double v : values_) require(std::isfinite(v), ErrorCode::domain, "non-finite grid function value");
  }

  template <class F>
  static GridFunction sample(GridSpec grid, F&& f) {
    std::vector<double> v(grid.n());
    for (std::size_t i = 0; i < grid.n(); ++i) v[i] = f(grid.point(i));
    return {grid, std::move(v)};
  }

  const GridSpec& grid() const noexcept { return grid_; }
  const std::vector<double>& values() const noexcept { return values_; }

 private:
  GridSpec grid_;
  std::vector<double> values_;
};

/// Moment coordinates (a, b, c) = (int f cos, int f sin, int f).
struct IceCreamPoint {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;

  double radius() const { return std::hypot(a, b); }
  /// arg(a + ib), with 0 for a = b = 0.
  double angle() const { return (a == 0.0 && b == 0.0) ? 0.0 : std::atan2(b, a); }
};

/// Uniform-weight quadrature of the three moment functionals.
inline IceCreamPoint moments(const GridFunction& f) {
  require(f.grid().n() >= 3, ErrorCode::precondition, "moments need at least 3 grid points");
  const GridSpec& g = f.grid();
  const auto n = static_cast<long long>(g.n());
  const bool aligned = g.offset() == 0.0;
  IceCreamPoint p;
  for (std::size_t i = 0; i < g.n(); ++i) {
    const double v = f.values()[i];
    const auto ii = static_cast<long long>(i);
    // exact trigonometric values on the aligned grid
    const double cs = aligned ? cos_of_turns(ii, n) : std::cos(g.point(i));
    const double sn = aligned ? cos_of_turns(4 * ii - n, 4 * n) : std::sin(g.point(i));
    p.a += v * cs;
    p.b += v * sn;
    p.c += v;
  }
  const double w = g.weight();
  return {p.a * w, p.b * w, p.c * w};
}

/// (S f)(s) = a cos s + b sin s + c, sampled on out_grid.
inline GridFunction apply_S(const GridFunction& f, const GridSpec& out_grid) {
  const IceCreamPoint p = moments(f);
  return GridFunction::sample(out_grid, [&](double s) { return p.a * std::cos(s) + p.b * std::sin(s) + p.c; });
}

enum class ConeRegion { inside, boundary, outside };

inline const char* to_string(ConeRegion r) {
  switch (r) {
    case ConeRegion::inside: return "inside";
    case ConeRegion::boundary: return "boundary";
    case ConeRegion::outside: return "outside";
  }
  return "unknown";
}

struct Membership {
  ConeRegion region = ConeRegion::inside;
  /// c - sqrt(a^2 + b^2): the minimum over s of a cos s + b sin s + c.
  double margin = 0.0;
};

inline Membership cone_membership(const IceCreamPoint& p, double eps = 1e-12) {
  require(eps >= 0.0, ErrorCode::precondition, "eps must be nonnegative");
  const double m = p.c - p.radius();
  const ConeRegion region = m > eps ? ConeRegion::inside : (m >= -eps ? ConeRegion::boundary : ConeRegion::outside);
  return {region, m};
}

/// P_r(t) = (1 - r^2) / (1 - 2 r cos t + r^2), 0 < r < 1.
inline double poisson_kernel(double r, double t) {
  require(r > 0.0 && r < 1.0, ErrorCode::precondition, "Poisson kernel needs 0 < r < 1");
  return (1.0 - r * r) / (1.0 - 2.0 * r * std::cos(t) + r * r);
}

struct PoissonParams {
  double r = 0.0;
  double theta = 0.0;
  double alpha = 0.0;
  double c = 0.0;
};

/// Minimal gap kept between r and R/c.
inline constexpr double poisson_r_margin = 1e-6;

/// Parameters of the two-atom measure (c/2) delta_{theta - alpha} + (c/2) delta_{theta + alpha},
/// cos(alpha) = R / (c r).
inline PoissonParams poisson_params(const IceCreamPoint& p, double r) {
  const Membership mem = cone_membership(p);
  require(mem.region == ConeRegion::inside, ErrorCode::precondition,
          mem.region == ConeRegion::boundary
              ? "boundary point has no nonnegative preimage: the image needs c > sqrt(a^2 + b^2) strictly"
              : "point lies outside the cone c >= sqrt(a^2 + b^2)");
  const double ratio = p.radius() / p.c;
  require(r < 1.0, ErrorCode::precondition, "r must be below 1");
  require(r >= ratio + poisson_r_margin, ErrorCode::precondition,
          "r must exceed R/c = " + std::to_string(ratio) + " (cos alpha = R/(c r) would exceed 1)");
  return {r, p.angle(), std::acos(ratio / r), p.c};
}

/// f(t) = (c / 4 pi) [P_r(t - theta + alpha) + P_r(t - theta - alpha)], a nonnegative
/// function with moments (a, b, c). The zero point maps to the zero function.
inline GridFunction poisson_preimage(const IceCreamPoint& p, double r, const GridSpec& out_grid) {
  if (p.a == 0.0 && p.b == 0.0 && p.c == 0.0) return {out_grid, std::vector<double>(out_grid.n(), 0.0)};
  const PoissonParams q = poisson_params(p, r);
  const double scale = q.c / (4.0 * std::numbers::pi);
  return GridFunction::sample(out_grid, [&](double t) {
    return scale * (poisson_kernel(q.r, t - q.theta + q.alpha) + poisson_kernel(q.r, t - q.theta - q.alpha));
  });
}

inline void write_grid_function_csv(std::ostream& out, const GridFunction& f) {
  out << "t,value\n";
  char buf[64];
  for (std::size_t i = 0; i < f.grid().n(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", f.grid().point(i), f.values()[i]);
    out << buf;
  }
}

// ---------------------------------------------------------------------------
// Discretization growth

struct GrowthOptions {
  bool exact3 = true;
  bool nmf = true;
  NmfOptions nmf_options{64, 0, 1e-9, 2000};
};

struct GrowthRow {
  std::size_t n = 0;
  std::size_t rank_float = 0;
  std::optional<std::size_t> k_exact3;
  std::optional<std::size_t> k_nmf;
  /// Best NMF residual one below the reference nonnegative rank (absent when that is below the rank).
  std::optional<double> residual_at_k_minus_1;
};

/// Kernel matrix on aligned grids of size n.
inline FloatMatrix kernel_matrix(std::size_t n, double offset = 0.0) {
  const GridSpec g(n, offset);
  return sample_kernel(g, g);
}

inline GrowthRow growth_row(std::size_t n, double offset, const GrowthOptions& opt) {
  require(n >= 3, ErrorCode::precondition, "growth experiment needs n >= 3");
  const FloatMatrix k = kernel_matrix(n, offset);
  GrowthRow row;
  row.n = n;
  row.rank_float = rank_float(k);
  if (opt.exact3) row.k_exact3 = nnrank_rank3(k).k;
  if (opt.nmf) {
    const auto found = min_k_search(k, std::max<std::size_t>(row.rank_float, 1), n, opt.nmf_options);
    row.k_nmf = found.k_best;
  }
  const std::optional<std::size_t> reference = row.k_exact3 ? row.k_exact3 : row.k_nmf;
  if (opt.nmf && reference && *reference >= 2 && *reference - 1 >= row.rank_float)
    row.residual_at_k_minus_1 = search_upper(k, *reference - 1, opt.nmf_options).best_residual;
  return row;
}

inline std::vector<GrowthRow> growth_experiment(const std::vector<std::size_t>& ns, double offset,
                                                const GrowthOptions& opt = {}) {
  std::vector<GrowthRow> rows;
  rows.reserve(ns.size());
  for (std::size_t n : ns) rows.push_back(growth_row(n, offset, opt));
  return rows;
}

/// Residual formatted to 12 significant digits.
inline std::string format_residual(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

inline void write_growth_csv(std::ostream& out, const std::vector<GrowthRow>& rows) {
  out << "n,rank_float,k_exact3,k_nmf,residual_at_k_minus_1\n";
  for (const auto& r : rows) {
    out << r.n << ',' << r.rank_float << ',' << (r.k_exact3 ? std::to_string(*r.k_exact3) : "") << ','
        << (r.k_nmf ? std::to_string(*r.k_nmf) : "") << ','
        << (r.residual_at_k_minus_1 ? format_residual(*r.residual_at_k_minus_1) : "") << '\n';
  }
}

}  // namespace nnrank
