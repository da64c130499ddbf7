#pragma once

// JSON reports shared by the command-line tool and the acceptance suite. All
// reports are deterministic functions of their inputs and seeds.

#include <cstdlib>
#include <ostream>
#include <string>
#include <variant>

#include "nnrank/lowrank.hpp"
#include "nnrank/matrix_io.hpp"
#include "nnrank/nmf.hpp"
#include "nnrank/nnfactor.hpp"
#include "nnrank/rank3geo.hpp"
#include "nnrank/sconelab.hpp"

namespace nnrank {

/// Residual rounded to 12 significant digits, as reported.
inline double report_residual(double x) { return std::strtod(format_residual(x).c_str(), nullptr); }

inline std::size_t matrix_rank(const AnyMatrix& m, double rel_tol = default_rank_tol) {
  if (const auto* exact = std::get_if<ExactMatrix>(&m)) return rank_exact(*exact);
  return rank_float(std::get<FloatMatrix>(m), rel_tol);
}

inline FloatMatrix float_view(const AnyMatrix& m) {
  return std::visit([](const auto& x) { return FloatMatrix(to_float(x)); }, m);
}

inline json rank_report(const AnyMatrix& m, double rel_tol = default_rank_tol) {
  json out{{"rank", matrix_rank(m, rel_tol)}, {"rows", std::visit([](const auto& x) { return x.rows(); }, m)},
           {"cols", std::visit([](const auto& x) { return x.cols(); }, m)}};
  if (std::holds_alternative<ExactMatrix>(m)) {
    out["arithmetic"] = "exact";
  } else {
    out["arithmetic"] = "float";
    out["rel_tol"] = rel_tol;
  }
  return out;
}

inline json bounds_report(const AnyMatrix& m) {
  const RankBounds b = std::visit([](const auto& x) { return bounds(x); }, m);
  return {{"method", "bounds"}, {"lower", b.lower}, {"upper", b.upper}, {"reference_upper", b.reference_upper}};
}

inline json exact2_report(const AnyMatrix& m) {
  const auto* exact = std::get_if<ExactMatrix>(&m);
  require(exact != nullptr, ErrorCode::precondition, "exact2 needs a rational matrix (rationalize float input first)");
  const ExactFactorization f = factor_rank_le2(*exact);
  return {{"method", "exact2"}, {"k", f.k()}, {"lower_bound", f.k()}, {"minimal", true},
          {"verified", verify(*exact, f)}, {"witness", to_json(f)}};
}

inline json polygon_json(const std::vector<Point2>& pts) {
  json out = json::array();
  for (const auto& p : pts) out.push_back({p.x, p.y});
  return out;
}

inline json exact3_report(const Rank3Result& r, bool verified) {
  return {{"method", "exact3"},
          {"k", r.k},
          {"lower_bound", r.lower_bound},
          {"minimal", r.minimal()},
          {"verified", verified},
          {"residual", report_residual(r.residual)},
          {"polygon", polygon_json(r.polygon.vertices)},
          {"witness", to_json(r.witness)}};
}

inline json exact3_report(const AnyMatrix& m, const SweepOptions& opt = {}) {
  return std::visit(
      [&](const auto& t) {
        const Rank3Result r = nnrank_rank3(t, opt);
        return exact3_report(r, verify_any(t, r.witness));
      },
      m);
}

/// CSV for external plotting: inner points, outer polygon vertices, witness polygon.
inline void write_polygon_plot_csv(std::ostream& out, const Rank3Result& r) {
  out << "kind,index,x,y\n";
  auto emit = [&](const char* kind, const std::vector<Point2>& pts) {
    for (std::size_t i = 0; i < pts.size(); ++i)
      out << kind << ',' << i << ',' << format_double(pts[i].x) << ',' << format_double(pts[i].y) << '\n';
  };
  emit("inner", r.instance.inner);
  emit("outer", outer_vertices(r.instance.outer, Point2{}));
  emit("witness", r.polygon.vertices);
}

inline json nmf_options_json(const NmfOptions& opt) {
  return {{"restarts", opt.restarts}, {"seed", opt.seed}, {"fit_tol", opt.fit_tol}, {"iters", opt.iters}};
}

/// Fixed-k search (k given) or upward scan over [k_lo, k_hi].
inline json nmf_report(const AnyMatrix& m, std::size_t k_lo, std::size_t k_hi, const NmfOptions& opt) {
  const FloatMatrix t = float_view(m);
  const MinKResult r = min_k_search(t, k_lo, k_hi, opt);
  json residuals = json::array();
  for (double x : r.residuals) residuals.push_back(report_residual(x));
  json out{{"method", "nmf"},
           {"k_range", {k_lo, k_hi}},
           {"options", nmf_options_json(opt)},
           {"best_residuals", residuals}};
  if (r.k_best) {
    out["k"] = *r.k_best;
    out["residual"] = residuals.back();
    out["witness"] = to_json(*r.witness);
    out["verified"] = verify(t, *r.witness, 2.0 * opt.fit_tol);
  } else {
    out["k"] = nullptr;
    out["residual"] = residuals.empty() ? json(nullptr) : residuals.back();
    out["note"] = "no fit found; this is not a lower-bound certificate";
  }
  return out;
}

inline json demo_robbins_report() {
  const ExactMatrix t = robbins_matrix();
  const Rank3Result r = nnrank_rank3(t);
  return {{"matrix", to_json(t)},
          {"rank", rank_exact(t)},
          {"nnrank", r.k},
          {"minimal", r.minimal()},
          {"exact_witness", std::holds_alternative<ExactFactorization>(r.witness)},
          {"verified", verify_any(t, r.witness)},
          {"witness", to_json(r.witness)}};
}

inline json membership_report(const IceCreamPoint& p, double eps) {
  const Membership mem = cone_membership(p, eps);
  return {{"a", p.a}, {"b", p.b}, {"c", p.c}, {"region", to_string(mem.region)}, {"margin", mem.margin}, {"eps", eps}};
}

inline json growth_json(const std::vector<GrowthRow>& rows, double offset, const GrowthOptions& opt) {
  json table = json::array();
  for (const auto& r : rows) {
    table.push_back({{"n", r.n},
                     {"rank_float", r.rank_float},
                     {"k_exact3", r.k_exact3 ? json(*r.k_exact3) : json(nullptr)},
                     {"k_nmf", r.k_nmf ? json(*r.k_nmf) : json(nullptr)},
                     {"residual_at_k_minus_1",
                      r.residual_at_k_minus_1 ? json(report_residual(*r.residual_at_k_minus_1)) : json(nullptr)}});
  }
  return {{"offset", offset}, {"options", nmf_options_json(opt.nmf_options)}, {"rows", table},
          {"note", "per-n values are measurements on discretized kernels"}};
}

}  // namespace nnrank
