#pragma once

// Exact nonnegative rank of rank-three nonnegative matrices.
//
// Normalizing the nonzero columns of T to unit column sum places them in a
// plane section of the column space. In that plane the columns are the inner
// point set and the rows of T cut out the outer polygon {x : (lifted x)_i >= 0}.
// rank+(T) is the least vertex count of a convex polygon nested between the
// hull of the inner points and the outer polygon; lifting its vertices back to
// the column space gives L, and convex weights of the inner points give R.
//
// The minimal nested polygon is found by a greedy supporting-chain sweep: from
// a point on the outer boundary, walk along the line that touches the inner
// hull (keeping it on the left) until the outer boundary is reached again. A
// polygon with k vertices exists iff some start point closes within k steps.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "nnrank/error.hpp"
#include "nnrank/matcore.hpp"
#include "nnrank/matrix.hpp"
#include "nnrank/nnfactor.hpp"

namespace nnrank {

struct Point2 {
  double x = 0.0;
  double y = 0.0;

  friend Point2 operator+(Point2 a, Point2 b) { return {a.x + b.x, a.y + b.y}; }
  friend Point2 operator-(Point2 a, Point2 b) { return {a.x - b.x, a.y - b.y}; }
  friend Point2 operator*(double s, Point2 a) { return {s * a.x, s * a.y}; }
  friend bool operator==(Point2, Point2) = default;
};

inline double cross(Point2 a, Point2 b) { return a.x * b.y - a.y * b.x; }
inline double dot(Point2 a, Point2 b) { return a.x * b.x + a.y * b.y; }
inline double norm(Point2 a) { return std::hypot(a.x, a.y); }

/// {p : u x + v y + w >= 0}; stored with (u, v) of unit length.
struct HalfPlane {
  double u = 0.0;
  double v = 0.0;
  double w = 0.0;

  double eval(Point2 p) const { return u * p.x + v * p.y + w; }
};

struct NestedPolygonInstance {
  std::vector<Point2> inner;
  std::vector<HalfPlane> outer;

  // Slice metadata. `lift` maps chart coordinates (x, y, 1) to a column of
  // the kept rows; inner point j stands for kept column j scaled by
  // column_scale[j].
  std::size_t source_rows = 0;
  std::size_t source_cols = 0;
  std::vector<std::size_t> kept_rows;
  std::vector<std::size_t> kept_cols;
  std::vector<double> column_scale;
  FloatMatrix lift;
};

/// Convex polygon, counterclockwise.
struct PolygonWitness {
  std::vector<Point2> vertices;
  std::size_t k() const noexcept { return vertices.size(); }
};

inline constexpr double geometric_slack = 1e-9;

struct SweepOptions {
  std::size_t uniform_starts = 720;
  double refine_width = 1e-12;
  std::size_t refined_starts = 16;
  double slack = geometric_slack;
};

// ---------------------------------------------------------------------------
// Slicing

/// Planar slice of a rank-three nonnegative matrix, with the exact chart data
/// needed to lift witnesses back without rounding.
template <class S>
struct Slice {
  NestedPolygonInstance instance;
  /// Kept rows x 3, maps raw chart coordinates (x, y, 1) to a column.
  Matrix<S> raw_lift;
  /// Raw chart coordinates of each kept column.
  std::vector<std::array<S, 2>> raw_inner;
  std::vector<S> raw_scale;
  /// Normalized chart q relates to the raw chart by raw = center + spread * q.
  Point2 center;
  double spread = 1.0;
};

namespace detail {

template <class S>
std::size_t checked_rank(const Matrix<S>& t) {
  if constexpr (is_exact_v<S>) {
    return rank_exact(t);
  } else {
    return rank_float(t);
  }
}

template <class S>
S det3(const std::array<std::array<S, 3>, 3>& g) {
  return g[0][0] * (g[1][1] * g[2][2] - g[1][2] * g[2][1]) - g[0][1] * (g[1][0] * g[2][2] - g[1][2] * g[2][0]) +
         g[0][2] * (g[1][0] * g[2][1] - g[1][1] * g[2][0]);
}

template <class S>
std::array<std::array<S, 3>, 3> inverse3(const std::array<std::array<S, 3>, 3>& g) {
  const S d = det3(g);
  require(d != 0, ErrorCode::domain, "internal: singular pivot block");
  std::array<std::array<S, 3>, 3> inv;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      const int r0 = (j + 1) % 3, r1 = (j + 2) % 3, c0 = (i + 1) % 3, c1 = (i + 2) % 3;
      inv[i][j] = (g[r0][c0] * g[r1][c1] - g[r0][c1] * g[r1][c0]) / d;
    }
  return inv;
}

// Three pivot rows/columns by complete pivoting on magnitude.
template <class S>
std::pair<std::array<std::size_t, 3>, std::array<std::size_t, 3>> pivot_block(const Matrix<S>& t) {
  std::vector<S> a(t.entries().begin(), t.entries().end());
  const std::size_t m = t.rows(), n = t.cols();
  std::vector<bool> row_used(m, false), col_used(n, false);
  std::array<std::size_t, 3> rows{}, cols{};
  for (int step = 0; step < 3; ++step) {
    std::size_t pr = m, pc = n;
    S best = 0;
    for (std::size_t i = 0; i < m; ++i) {
      if (row_used[i]) continue;
      for (std::size_t j = 0; j < n; ++j) {
        if (col_used[j]) continue;
        const S mag = abs_value(a[i * n + j]);
        if (mag > best) {
          best = mag;
          pr = i;
          pc = j;
        }
      }
    }
    require(pr < m, ErrorCode::precondition, "matrix has rank below three");
    rows[step] = pr;
    cols[step] = pc;
    row_used[pr] = col_used[pc] = true;
    const S p = a[pr * n + pc];
    for (std::size_t i = 0; i < m; ++i) {
      if (row_used[i]) continue;
      const S f = a[i * n + pc] / p;
      if (f == 0) continue;
      for (std::size_t j = 0; j < n; ++j) a[i * n + j] -= f * a[pr * n + j];
    }
  }
  return {rows, cols};
}

}  // namespace detail

/// Projective slice of a nonnegative rank-three matrix (zero rows and columns dropped).
template <class S>
Slice<S> slice_rank3(const Matrix<S>& t) {
  require(t.nonnegative(), ErrorCode::domain, "matrix has a negative entry");
  require(!t.is_zero(), ErrorCode::precondition, "all-zero matrix has no planar slice");
  const std::size_t r = detail::checked_rank(t);
  require(r == 3, ErrorCode::precondition,
          "rank " + std::to_string(r) + " input: the exact3 path needs rank three" +
              (r <= 2 ? std::string(" (use exact2)") : std::string(" (use bounds or nmf)")));

  Slice<S> out;
  NestedPolygonInstance& inst = out.instance;
  inst.source_rows = t.rows();
  inst.source_cols = t.cols();
  for (std::size_t i = 0; i < t.rows(); ++i) {
    auto row = t.row(i);
    if (std::any_of(row.begin(), row.end(), [](const S& x) { return x != 0; })) inst.kept_rows.push_back(i);
  }
  for (std::size_t j = 0; j < t.cols(); ++j)
    for (std::size_t i = 0; i < t.rows(); ++i)
      if (t(i, j) != 0) {
        inst.kept_cols.push_back(j);
        break;
      }
  const Matrix<S> kept = t.select(inst.kept_rows, inst.kept_cols);
  const std::size_t m = kept.rows(), n = kept.cols();

  const auto [prow, pcol] = detail::pivot_block(kept);
  std::array<std::array<S, 3>, 3> g;
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) g[a][b] = kept(prow[a], pcol[b]);
  const auto ginv = detail::inverse3(g);

  // weights of the all-ones functional on the basis columns
  std::array<S, 3> w{S(0), S(0), S(0)};
  for (std::size_t i = 0; i < m; ++i)
    for (int b = 0; b < 3; ++b) w[b] += kept(i, pcol[b]);
  int c = 0;
  for (int b = 1; b < 3; ++b)
    if (abs_value(w[b]) > abs_value(w[c])) c = b;
  const int a0 = (c + 1) % 3, a1 = (c + 2) % 3;

  // lift (x, y, 1) -> B * coeff, coeff_a0 = x, coeff_a1 = y, coeff_c = (1 - w_a0 x - w_a1 y) / w_c
  std::vector<S> lift(m * 3);
  for (std::size_t i = 0; i < m; ++i) {
    const S bc = kept(i, pcol[c]) / w[c];
    lift[i * 3 + 0] = kept(i, pcol[a0]) - bc * w[a0];
    lift[i * 3 + 1] = kept(i, pcol[a1]) - bc * w[a1];
    lift[i * 3 + 2] = bc;
  }
  out.raw_lift = Matrix<S>(m, 3, std::move(lift));

  out.raw_inner.reserve(n);
  out.raw_scale.reserve(n);
  for (std::size_t j = 0; j < n; ++j) {
    std::array<S, 3> coeff{S(0), S(0), S(0)};
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b) coeff[a] += ginv[a][b] * kept(prow[b], j);
    const S scale = w[0] * coeff[0] + w[1] * coeff[1] + w[2] * coeff[2];
    require(scale > 0, ErrorCode::domain, "internal: nonpositive column sum in slice");
    out.raw_inner.push_back({coeff[a0] / scale, coeff[a1] / scale});
    out.raw_scale.push_back(scale);
  }

  // normalized chart: centered on the inner centroid, unit inner radius
  double cx = 0.0, cy = 0.0;
  for (const auto& p : out.raw_inner) {
    cx += to_double(p[0]);
    cy += to_double(p[1]);
  }
  cx /= static_cast<double>(n);
  cy /= static_cast<double>(n);
  double spread = 0.0;
  for (const auto& p : out.raw_inner) spread = std::max(spread, std::hypot(to_double(p[0]) - cx, to_double(p[1]) - cy));
  require(spread > 0.0, ErrorCode::precondition, "all columns are proportional");
  out.center = {cx, cy};
  out.spread = spread;

  for (const auto& p : out.raw_inner) inst.inner.push_back({(to_double(p[0]) - cx) / spread, (to_double(p[1]) - cy) / spread});
  for (const auto& s : out.raw_scale) inst.column_scale.push_back(to_double(s));

  std::vector<double> lift_norm(m * 3);
  for (std::size_t i = 0; i < m; ++i) {
    const double u = to_double(out.raw_lift(i, 0)), v = to_double(out.raw_lift(i, 1)),
                 ww = to_double(out.raw_lift(i, 2));
    lift_norm[i * 3 + 0] = u * spread;
    lift_norm[i * 3 + 1] = v * spread;
    lift_norm[i * 3 + 2] = u * cx + v * cy + ww;
  }
  inst.lift = FloatMatrix(m, 3, std::move(lift_norm));

  double lift_scale = 0.0;
  for (double x : inst.lift.entries()) lift_scale = std::max(lift_scale, std::fabs(x));
  for (std::size_t i = 0; i < m; ++i) {
    const double u = inst.lift(i, 0), v = inst.lift(i, 1), ww = inst.lift(i, 2);
    const double len = std::hypot(u, v);
    // rows constant on the chart impose no planar constraint
    if (len <= 1e-13 * lift_scale) continue;
    inst.outer.push_back({u / len, v / len, ww / len});
  }
  return out;
}

template <class S>
NestedPolygonInstance projective_slice(const Matrix<S>& t) {
  return slice_rank3(t).instance;
}

// ---------------------------------------------------------------------------
// Planar geometry

/// Convex hull, counterclockwise, without collinear or duplicate points.
inline std::vector<Point2> convex_hull(std::vector<Point2> pts, double eps = 1e-12) {
  std::sort(pts.begin(), pts.end(), [](Point2 a, Point2 b) { return a.x < b.x || (a.x == b.x && a.y < b.y); });
  pts.erase(std::unique(pts.begin(), pts.end(), [eps](Point2 a, Point2 b) { return norm(a - b) <= eps; }), pts.end());
  if (pts.size() < 3) return pts;
  std::vector<Point2> hull(2 * pts.size());
  std::size_t k = 0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    while (k >= 2 && cross(hull[k - 1] - hull[k - 2], pts[i] - hull[k - 2]) <= eps) --k;
    hull[k++] = pts[i];
  }
  for (std::size_t i = pts.size() - 1, lower = k + 1; i-- > 0;) {
    while (k >= lower && cross(hull[k - 1] - hull[k - 2], pts[i] - hull[k - 2]) <= eps) --k;
    hull[k++] = pts[i];
  }
  hull.resize(k - 1);
  return hull;
}

/// True iff the half-plane normals leave no direction unconstrained.
inline bool outer_is_bounded(const std::vector<HalfPlane>& outer) {
  if (outer.size() < 3) return false;
  std::vector<double> angles;
  angles.reserve(outer.size());
  for (const auto& h : outer) angles.push_back(std::atan2(h.v, h.u));
  std::sort(angles.begin(), angles.end());
  double gap = angles.front() + two_pi - angles.back();
  for (std::size_t i = 1; i < angles.size(); ++i) gap = std::max(gap, angles[i] - angles[i - 1]);
  return gap < std::numbers::pi - 1e-12;
}

/// Vertices of a bounded outer region, counterclockwise around `center`.
inline std::vector<Point2> outer_vertices(const std::vector<HalfPlane>& outer, Point2 center, double slack = geometric_slack) {
  std::vector<Point2> pts;
  for (std::size_t a = 0; a < outer.size(); ++a)
    for (std::size_t b = a + 1; b < outer.size(); ++b) {
      const double det = outer[a].u * outer[b].v - outer[a].v * outer[b].u;
      if (std::fabs(det) < 1e-14) continue;
      const Point2 p{(-outer[a].w * outer[b].v + outer[b].w * outer[a].v) / det,
                     (-outer[a].u * outer[b].w + outer[b].u * outer[a].w) / det};
      bool inside = true;
      for (const auto& h : outer)
        if (h.eval(p) < -slack) {
          inside = false;
          break;
        }
      if (inside) pts.push_back(p);
    }
  auto hull = convex_hull(pts, 1e-11);
  // rotate so the order starts at the smallest angle around center (determinism)
  auto first = std::min_element(hull.begin(), hull.end(), [center](Point2 a, Point2 b) {
    return std::atan2(a.y - center.y, a.x - center.x) < std::atan2(b.y - center.y, b.x - center.x);
  });
  std::rotate(hull.begin(), first, hull.end());
  return hull;
}

/// Largest violation of the nesting conditions (0 when the polygon is valid).
inline double polygon_violation(const NestedPolygonInstance& inst, const PolygonWitness& poly) {
  const auto& v = poly.vertices;
  if (v.size() < 3) return std::numeric_limits<double>::infinity();
  double worst = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const Point2 a = v[i], b = v[(i + 1) % v.size()], c = v[(i + 2) % v.size()];
    const double len = norm(b - a);
    if (len == 0.0) return std::numeric_limits<double>::infinity();
    for (const auto& p : inst.inner) worst = std::max(worst, -cross(b - a, p - a) / len);
    worst = std::max(worst, -cross(b - a, c - b) / len);
    for (const auto& h : inst.outer) worst = std::max(worst, -h.eval(a));
  }
  return worst;
}

// ---------------------------------------------------------------------------
// Supporting-chain sweep

namespace detail {

class ChainWalker {
 public:
  ChainWalker(const NestedPolygonInstance& inst, std::vector<Point2> hull) : inst_(inst), hull_(std::move(hull)) {
    for (const auto& p : hull_) center_ = center_ + (1.0 / static_cast<double>(hull_.size())) * p;
  }

  Point2 center() const { return center_; }
  const std::vector<Point2>& hull() const { return hull_; }

  /// First boundary point on the ray from `from` along `dir`; at least `from + dir` when dir aims at a hull point.
  Point2 exit_point(Point2 from, Point2 dir, double min_step) const {
    const double len = norm(dir);
    double s_max = std::numeric_limits<double>::infinity();
    for (const auto& h : inst_.outer) {
      const double rate = h.u * dir.x + h.v * dir.y;
      if (rate >= -1e-12 * len) continue;
      s_max = std::min(s_max, std::max(0.0, h.eval(from)) / -rate);
    }
    return from + std::max(s_max, min_step) * dir;
  }

  /// One greedy step. forward: counterclockwise with the hull on the left.
  Point2 step(Point2 x, bool forward) const {
    const Point2 r = center_ - x;
    Point2 best{};
    double best_angle = 0.0, best_len = 0.0;
    bool found = false;
    for (const auto& p : hull_) {
      const Point2 d = p - x;
      const double len = norm(d);
      if (len <= 1e-12) continue;
      double angle = std::atan2(cross(r, d), dot(r, d));
      if (!forward) angle = -angle;
      if (!found || angle < best_angle - 1e-15 || (angle <= best_angle + 1e-15 && len > best_len)) {
        best = d;
        best_angle = angle;
        best_len = len;
        found = true;
      }
    }
    if (!found) return x;
    return exit_point(x, best, 1.0);
  }

  /// Counterclockwise angle swept around the center from a to b, in [0, pi).
  double swept(Point2 a, Point2 b, bool forward) const {
    const Point2 u = a - center_, v = b - center_;
    double angle = std::atan2(cross(u, v), dot(u, v));
    if (!forward) angle = -angle;
    return std::max(0.0, angle);
  }

  /// Boundary point in direction theta from the center.
  Point2 boundary_at(double theta) const {
    return exit_point(center_, {std::cos(theta), std::sin(theta)}, 0.0);
  }

  double angle_of(Point2 p) const { return std::atan2(p.y - center_.y, p.x - center_.x); }

  /// Runs k forward steps; returns the vertices and the swept angle.
  std::pair<std::vector<Point2>, double> chain(Point2 start, std::size_t k) const {
    std::vector<Point2> verts{start};
    double total = 0.0;
    Point2 x = start;
    for (std::size_t i = 0; i < k; ++i) {
      const Point2 y = step(x, true);
      total += swept(x, y, true);
      if (i + 1 < k) verts.push_back(y);
      x = y;
    }
    return {std::move(verts), total};
  }

 private:
  const NestedPolygonInstance& inst_;
  std::vector<Point2> hull_;
  Point2 center_{};
};

inline std::vector<Point2> dedupe_cyclic(std::vector<Point2> v, double eps) {
  std::vector<Point2> out;
  for (const auto& p : v)
    if (out.empty() || norm(p - out.back()) > eps) out.push_back(p);
  while (out.size() > 1 && norm(out.front() - out.back()) <= eps) out.pop_back();
  return out;
}

}  // namespace detail

/// Validates an instance: bounded outer region, inner points inside it, and a
/// two-dimensional inner hull.
inline void check_instance(const NestedPolygonInstance& inst, double slack = geometric_slack) {
  require(outer_is_bounded(inst.outer), ErrorCode::precondition, "outer region is unbounded");
  for (const auto& p : inst.inner)
    for (const auto& h : inst.outer)
      require(h.eval(p) >= -slack, ErrorCode::precondition, "inner point lies outside the outer region");
  require(convex_hull(inst.inner).size() >= 3, ErrorCode::precondition,
          "inner points are collinear (matrix rank below three)");
}

/// Tries to close a chain of k vertices; returns a certified polygon on success.
inline std::optional<PolygonWitness> nested_polygon_with(const NestedPolygonInstance& inst, std::size_t k,
                                                         const SweepOptions& opt = {}) {
  if (k < 3) return std::nullopt;
  const auto hull = convex_hull(inst.inner);
  const detail::ChainWalker walker(inst, hull);
  const auto outer = outer_vertices(inst.outer, walker.center(), opt.slack);

  auto attempt = [&](Point2 start) -> std::pair<std::optional<PolygonWitness>, double> {
    auto [verts, total] = walker.chain(start, k);
    if (total < two_pi - 1e-9) return {std::nullopt, total};
    PolygonWitness poly{detail::dedupe_cyclic(std::move(verts), 1e-12)};
    if (poly.k() >= 3 && poly.k() <= k && polygon_violation(inst, poly) <= opt.slack) return {poly, total};
    return {std::nullopt, total};
  };

  // critical starts: outer vertices, contact points, flush hull-edge lines
  std::vector<Point2> critical(outer.begin(), outer.end());
  for (const auto& p : hull) {
    double margin = std::numeric_limits<double>::infinity();
    for (const auto& h : inst.outer) margin = std::min(margin, h.eval(p));
    if (margin <= opt.slack) critical.push_back(p);
  }
  for (std::size_t i = 0; i < hull.size(); ++i) {
    const Point2 a = hull[i], b = hull[(i + 1) % hull.size()];
    critical.push_back(walker.exit_point(b, b - a, 0.0));
    critical.push_back(walker.exit_point(a, a - b, 0.0));
  }
  std::vector<Point2> starts = critical;
  for (const auto& c : critical) {
    Point2 x = c;
    for (std::size_t j = 1; j < k; ++j) {
      x = walker.step(x, false);
      starts.push_back(x);
    }
  }
  for (const auto& s : starts)
    if (auto poly = attempt(s).first) return poly;

  // uniform sweep, then local refinement of the most promising starts
  std::vector<std::pair<double, double>> scored;  // (swept angle, theta)
  scored.reserve(opt.uniform_starts);
  for (std::size_t j = 0; j < opt.uniform_starts; ++j) {
    const double theta = two_pi * static_cast<double>(j) / static_cast<double>(opt.uniform_starts);
    auto [poly, total] = attempt(walker.boundary_at(theta));
    if (poly) return poly;
    scored.emplace_back(total, theta);
  }
  std::stable_sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
  const double h = two_pi / static_cast<double>(std::max<std::size_t>(opt.uniform_starts, 1));
  const double golden = (std::sqrt(5.0) - 1.0) / 2.0;
  for (std::size_t s = 0; s < std::min(opt.refined_starts, scored.size()); ++s) {
    double lo = scored[s].second - h, hi = scored[s].second + h;
    auto value = [&](double theta) { return attempt(walker.boundary_at(theta)); };
    double x1 = hi - golden * (hi - lo), x2 = lo + golden * (hi - lo);
    auto f1 = value(x1), f2 = value(x2);
    while (hi - lo > opt.refine_width) {
      if (f1.first) return f1.first;
      if (f2.first) return f2.first;
      if (f1.second >= f2.second) {
        hi = x2;
        x2 = x1;
        f2 = f1;
        x1 = hi - golden * (hi - lo);
        f1 = value(x1);
      } else {
        lo = x1;
        x1 = x2;
        f1 = f2;
        x2 = lo + golden * (hi - lo);
        f2 = value(x2);
      }
    }
    if (f1.first) return f1.first;
    if (f2.first) return f2.first;
  }
  return std::nullopt;
}

/// Polygon with the fewest vertices nested between conv(inner) and the outer region.
inline PolygonWitness min_nested_polygon(const NestedPolygonInstance& inst, const SweepOptions& opt = {}) {
  check_instance(inst, opt.slack);
  const auto hull = convex_hull(inst.inner);
  Point2 center{};
  for (const auto& p : hull) center = center + (1.0 / static_cast<double>(hull.size())) * p;
  const auto outer = outer_vertices(inst.outer, center, opt.slack);
  const std::size_t k_max = std::min(hull.size(), outer.size());
  for (std::size_t k = 3; k < k_max; ++k)
    if (auto poly = nested_polygon_with(inst, k, opt)) return *poly;
  return PolygonWitness{hull.size() <= outer.size() ? hull : outer};
}

// ---------------------------------------------------------------------------
// Lifting

namespace detail {

// Convex weights of p over the polygon, from the fan triangle with the largest minimum weight.
inline std::vector<double> convex_weights(const std::vector<Point2>& poly, Point2 p) {
  std::vector<double> best(poly.size(), 0.0);
  double best_min = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i + 1 < poly.size(); ++i) {
    const Point2 a = poly[0], b = poly[i], c = poly[i + 1];
    const double area = cross(b - a, c - a);
    if (area <= 0.0) continue;
    const double wb = cross(p - a, c - a) / area;
    const double wc = cross(b - a, p - a) / area;
    const double wa = 1.0 - wb - wc;
    const double lowest = std::min({wa, wb, wc});
    if (lowest > best_min) {
      best_min = lowest;
      std::fill(best.begin(), best.end(), 0.0);
      best[0] = wa;
      best[i] = wb;
      best[i + 1] = wc;
    }
  }
  return best;
}

// Best rational approximation with denominator at most max_den (continued fractions).
inline Rational approximate_rational(double x, long max_den) {
  const bool negative = x < 0;
  double rest = std::fabs(x);
  mpz_class p0 = 0, q0 = 1, p1 = 1, q1 = 0;
  for (int iter = 0; iter < 64; ++iter) {
    const double a = std::floor(rest);
    if (a > 1e15) break;
    const mpz_class ai(static_cast<long>(a));
    const mpz_class p2 = ai * p1 + p0, q2 = ai * q1 + q0;
    if (q2 > max_den) break;
    p0 = p1;
    q0 = q1;
    p1 = p2;
    q1 = q2;
    const double frac = rest - a;
    if (frac < 1e-15) break;
    rest = 1.0 / frac;
  }
  if (q1 == 0) return Rational(0);
  Rational r(p1, q1);
  r.canonicalize();
  return negative ? Rational(-r) : r;
}

// Exact witness from rationalized polygon vertices, if every exact check passes.
inline std::optional<ExactFactorization> exact_lift(const ExactMatrix& t, const Slice<Rational>& slice,
                                                    const PolygonWitness& poly) {
  const auto& inst = slice.instance;
  const std::size_t k = poly.k();
  for (long max_den : {1000L, 1000000L, 1000000000L}) {
    std::vector<std::array<Rational, 2>> verts;
    for (const auto& v : poly.vertices) {
      const double rx = slice.center.x + slice.spread * v.x, ry = slice.center.y + slice.spread * v.y;
      verts.push_back({approximate_rational(rx, max_den), approximate_rational(ry, max_den)});
    }
    std::vector<Rational> left(inst.source_rows * k, Rational(0));
    bool ok = true;
    for (std::size_t i = 0; i < inst.kept_rows.size() && ok; ++i)
      for (std::size_t c = 0; c < k; ++c) {
        const Rational val = slice.raw_lift(i, 0) * verts[c][0] + slice.raw_lift(i, 1) * verts[c][1] + slice.raw_lift(i, 2);
        if (val < 0) {
          ok = false;
          break;
        }
        left[inst.kept_rows[i] * k + c] = val;
      }
    if (!ok) continue;

    std::vector<Rational> right(k * inst.source_cols, Rational(0));
    for (std::size_t j = 0; j < inst.kept_cols.size() && ok; ++j) {
      const auto& p = slice.raw_inner[j];
      bool placed = false;
      for (std::size_t i = 1; i + 1 < k && !placed; ++i) {
        const auto &a = verts[0], &b = verts[i], &c = verts[i + 1];
        const Rational area = (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]);
        if (area <= 0) continue;
        const Rational wb = ((p[0] - a[0]) * (c[1] - a[1]) - (p[1] - a[1]) * (c[0] - a[0])) / area;
        const Rational wc = ((b[0] - a[0]) * (p[1] - a[1]) - (b[1] - a[1]) * (p[0] - a[0])) / area;
        const Rational wa = 1 - wb - wc;
        if (wa < 0 || wb < 0 || wc < 0) continue;
        const Rational& s = slice.raw_scale[j];
        const std::size_t col = inst.kept_cols[j];
        right[0 * inst.source_cols + col] = s * wa;
        right[i * inst.source_cols + col] = s * wb;
        right[(i + 1) * inst.source_cols + col] = s * wc;
        placed = true;
      }
      ok = placed;
    }
    if (!ok) continue;
    ExactFactorization f(ExactMatrix(inst.source_rows, k, std::move(left)),
                         ExactMatrix(k, inst.source_cols, std::move(right)));
    if (verify(t, f)) return f;
  }
  return std::nullopt;
}

}  // namespace detail

/// Float witness from lifting polygon vertices; entries within tol of zero are clamped.
inline FloatFactorization lift_polygon(const NestedPolygonInstance& inst, const PolygonWitness& poly,
                                       double tol = default_verify_tol) {
  const std::size_t k = poly.k();
  std::vector<double> left(inst.source_rows * k, 0.0);
  for (std::size_t i = 0; i < inst.kept_rows.size(); ++i)
    for (std::size_t c = 0; c < k; ++c) {
      const Point2 v = poly.vertices[c];
      left[inst.kept_rows[i] * k + c] = inst.lift(i, 0) * v.x + inst.lift(i, 1) * v.y + inst.lift(i, 2);
    }
  std::vector<double> right(k * inst.source_cols, 0.0);
  for (std::size_t j = 0; j < inst.kept_cols.size(); ++j) {
    const auto w = detail::convex_weights(poly.vertices, inst.inner[j]);
    for (std::size_t c = 0; c < k; ++c) right[c * inst.source_cols + inst.kept_cols[j]] = inst.column_scale[j] * w[c];
  }
  return make_float_witness(FloatMatrix(inst.source_rows, k, std::move(left)),
                            FloatMatrix(k, inst.source_cols, std::move(right)), tol);
}

/// The nested polygon lives in the column-space plane, so its vertex count k is
/// the restricted nonnegative rank: a certified upper bound on rank+(T). Since
/// rank+(T) = 3 forces the factor columns into the column space, k <= 4 is exact;
/// above that only rank+(T) >= 4 is certified.
struct Rank3Result {
  std::size_t k = 0;
  std::size_t lower_bound = 0;
  AnyFactorization witness;
  PolygonWitness polygon;
  NestedPolygonInstance instance;
  /// Max-entry |L R - T| of the returned witness (0 for exact witnesses).
  double residual = 0.0;

  bool minimal() const { return lower_bound == k; }
};

/// Nonnegative rank of a rank-three nonnegative matrix with a verified witness.
template <class S>
Rank3Result nnrank_rank3(const Matrix<S>& t, const SweepOptions& opt = {}) {
  Slice<S> slice = slice_rank3(t);
  PolygonWitness poly = min_nested_polygon(slice.instance, opt);
  const std::size_t k = poly.k();

  std::optional<AnyFactorization> witness;
  if constexpr (is_exact_v<S>) {
    if (auto exact = detail::exact_lift(t, slice, poly)) witness = *exact;
  }
  if (!witness && k == std::min(t.rows(), t.cols())) witness = AnyFactorization(trivial_witness(t));
  if (!witness) {
    auto lifted = lift_polygon(slice.instance, poly);
    require(verify(t, lifted, default_verify_tol), ErrorCode::domain,
            "lifted witness fails verification (residual " + format_double(residual(t, lifted)) + ")");
    witness = std::move(lifted);
  }
  Rank3Result out{k, std::min<std::size_t>(k, 4), std::move(*witness), std::move(poly), std::move(slice.instance), 0.0};
  if (const auto* f = std::get_if<FloatFactorization>(&out.witness)) out.residual = residual(t, *f);
  if constexpr (!is_exact_v<S>) {
    if (const auto* f = std::get_if<ExactFactorization>(&out.witness)) out.residual = residual(t, *f);
  }
  return out;
}

}  // namespace nnrank
