#include <gtest/gtest.h>

#include <functional>
#include <random>

#include "nnrank/rank3geo.hpp"
#include "nnrank/sconelab.hpp"

using namespace nnrank;

namespace {

double min_margin(const NestedPolygonInstance& inst, Point2 p) {
  double m = std::numeric_limits<double>::infinity();
  for (const auto& h : inst.outer) m = std::min(m, h.eval(p));
  return m;
}

// An r-term nonnegative factorization covers the support with r all-nonzero
// rectangles; exhaustive search over all rectangle families.
bool support_has_rectangle_cover(const ExactMatrix& t, std::size_t r) {
  const std::size_t m = t.rows(), n = t.cols();
  std::vector<std::pair<unsigned, unsigned>> rects;
  for (unsigned rs = 1; rs < (1u << m); ++rs)
    for (unsigned cs = 1; cs < (1u << n); ++cs) {
      bool inside = true;
      for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j)
          if ((rs >> i & 1) && (cs >> j & 1) && t(i, j) == 0) inside = false;
      if (inside) rects.emplace_back(rs, cs);
    }
  std::function<bool(std::size_t, std::size_t, std::vector<unsigned>)> search = [&](std::size_t from, std::size_t left,
                                                                                    std::vector<unsigned> covered) {
    bool full = true;
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (t(i, j) != 0 && !(covered[i] >> j & 1)) full = false;
    if (full) return true;
    if (left == 0) return false;
    for (std::size_t q = from; q < rects.size(); ++q) {
      auto next = covered;
      for (std::size_t i = 0; i < m; ++i)
        if (rects[q].first >> i & 1) next[i] |= rects[q].second;
      if (search(q + 1, left - 1, next)) return true;
    }
    return false;
  };
  return search(0, r, std::vector<unsigned>(m, 0));
}

ExactMatrix kernel_exact(std::size_t n) { return to_exact(kernel_matrix(n)); }

// Slack matrix of inner points against the facets of a convex outer polygon:
// T(i, j) = a_i x_j + b_i y_j + c_i >= 0, rank three for generic data.
ExactMatrix slack_instance(std::mt19937_64& gen, std::size_t facets, std::size_t points) {
  std::uniform_int_distribution<int> coord(-4, 4);
  std::vector<Rational> e;
  std::vector<std::array<Rational, 2>> pts;
  for (std::size_t j = 0; j < points; ++j) pts.push_back({Rational(coord(gen), 4), Rational(coord(gen), 4)});
  // facets tangent-ish to a circle of radius ~2, normals at random-ish integer directions
  const std::array<std::array<int, 2>, 8> dirs{{{1, 0}, {1, 1}, {0, 1}, {-1, 1}, {-1, 0}, {-1, -1}, {0, -1}, {1, -1}}};
  std::uniform_int_distribution<int> off(2, 4);
  for (std::size_t i = 0; i < facets; ++i) {
    const auto d = dirs[(i * 8) / facets];
    const Rational c = off(gen);
    for (const auto& p : pts) {
      Rational v = c - d[0] * p[0] - d[1] * p[1];
      v.canonicalize();
      e.push_back(v);
    }
  }
  return ExactMatrix(facets, points, std::move(e));
}

NestedPolygonInstance hexagons(double outer_radius) {
  NestedPolygonInstance inst;
  for (int i = 0; i < 6; ++i) {
    const double a = two_pi * i / 6.0;
    inst.inner.push_back({std::cos(a), std::sin(a)});
    const double b = a + two_pi / 12.0;
    // outward normal at angle b; apothem of the outer hexagon
    inst.outer.push_back({-std::cos(b), -std::sin(b), outer_radius * std::sqrt(3.0) / 2.0});
  }
  return inst;
}

}  // namespace

TEST(ProjectiveSlice, KernelFourIsSquareInSquare) {
  const auto inst = projective_slice(kernel_matrix(4));
  ASSERT_EQ(inst.inner.size(), 4u);
  ASSERT_EQ(inst.outer.size(), 4u);
  EXPECT_EQ(convex_hull(inst.inner).size(), 4u);
  const auto outer = outer_vertices(inst.outer, Point2{});
  ASSERT_EQ(outer.size(), 4u);
  // every inner point is the midpoint of an outer edge
  for (const auto& p : inst.inner) {
    EXPECT_NEAR(min_margin(inst, p), 0.0, 1e-12);
    double best = 1.0;
    for (std::size_t i = 0; i < 4; ++i) best = std::min(best, norm(p - 0.5 * (outer[i] + outer[(i + 1) % 4])));
    EXPECT_LT(best, 1e-12);
  }
  // the chart is affine, so the inner square shows up as a parallelogram
  const auto hull = convex_hull(inst.inner);
  ASSERT_EQ(hull.size(), 4u);
  EXPECT_LT(norm(0.5 * (hull[0] + hull[2]) - 0.5 * (hull[1] + hull[3])), 1e-12);
}

TEST(ProjectiveSlice, IdentityGivesItsOwnTriangle) {
  const auto inst = projective_slice(ExactMatrix::identity(3));
  ASSERT_EQ(inst.inner.size(), 3u);
  const auto outer = outer_vertices(inst.outer, Point2{});
  ASSERT_EQ(outer.size(), 3u);
  for (const auto& p : inst.inner) {
    double best = 1.0;
    for (const auto& v : outer) best = std::min(best, norm(p - v));
    EXPECT_LT(best, 1e-12);
  }
}

TEST(ProjectiveSlice, RobbinsInnerPointsOnOuterBoundary) {
  const auto inst = projective_slice(robbins_matrix());
  EXPECT_EQ(inst.inner.size(), 4u);
  EXPECT_EQ(outer_vertices(inst.outer, Point2{}).size(), 4u);
  for (const auto& p : inst.inner) EXPECT_NEAR(min_margin(inst, p), 0.0, 1e-12);
}

TEST(ProjectiveSlice, DropsZeroRowsAndColumns) {
  const ExactMatrix t{{1, 0, 0, 0}, {0, 0, 0, 0}, {0, 1, 0, 0}, {0, 0, 0, 1}};
  const auto inst = projective_slice(t);
  EXPECT_EQ(inst.kept_rows, (std::vector<std::size_t>{0, 2, 3}));
  EXPECT_EQ(inst.kept_cols, (std::vector<std::size_t>{0, 1, 3}));
  const auto r = nnrank_rank3(t);
  EXPECT_EQ(r.k, 3u);
  EXPECT_TRUE(verify_any(t, r.witness));
}

TEST(ProjectiveSlice, Errors) {
  auto code = [](auto&& f) {
    try {
      f();
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::io;
  };
  EXPECT_EQ(code([] { projective_slice(ExactMatrix{{1, 1}, {0, 1}}); }), ErrorCode::precondition);
  EXPECT_EQ(code([] { projective_slice(ExactMatrix::identity(4)); }), ErrorCode::precondition);
  EXPECT_EQ(code([] { projective_slice(ExactMatrix(3, 3)); }), ErrorCode::precondition);
  EXPECT_EQ(code([] { projective_slice(ExactMatrix{{1, -1, 0}, {0, 1, 0}, {0, 0, 1}}); }), ErrorCode::domain);
  try {
    projective_slice(ExactMatrix{{1, 1}, {0, 1}});
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("exact2"), std::string::npos);
  }
}

TEST(MinNestedPolygon, InnerTriangleInsideLargeTriangle) {
  NestedPolygonInstance inst;
  inst.inner = {{0.0, 0.0}, {0.2, 0.0}, {0.0, 0.2}, {0.05, 0.05}};
  inst.outer = {{1, 0, 1}, {0, 1, 1}, {-1, -1, 1}};
  const auto poly = min_nested_polygon(inst);
  EXPECT_EQ(poly.k(), 3u);
  EXPECT_LE(polygon_violation(inst, poly), geometric_slack);
}

TEST(MinNestedPolygon, VertexCountShrinksAsOuterGrows) {
  std::size_t previous = 100;
  for (double radius : {1.02, 1.2, 1.5, 2.0, 3.0}) {
    const auto inst = hexagons(radius);
    const auto poly = min_nested_polygon(inst);
    EXPECT_LE(poly.k(), previous) << "radius " << radius;
    EXPECT_LE(polygon_violation(inst, poly), geometric_slack);
    previous = poly.k();
  }
  EXPECT_EQ(min_nested_polygon(hexagons(3.0)).k(), 3u);
  EXPECT_EQ(min_nested_polygon(hexagons(1.02)).k(), 6u);
}

TEST(MinNestedPolygon, InstanceErrors) {
  NestedPolygonInstance open;
  open.inner = {{0, 0}, {1, 0}, {0, 1}};
  open.outer = {{1, 0, 1}, {0, 1, 1}};
  EXPECT_THROW(min_nested_polygon(open), Error);

  NestedPolygonInstance outside = hexagons(1.5);
  outside.inner.push_back({5.0, 0.0});
  EXPECT_THROW(min_nested_polygon(outside), Error);

  NestedPolygonInstance line = hexagons(1.5);
  line.inner = {{-0.5, 0.0}, {0.0, 0.0}, {0.5, 0.0}};
  EXPECT_THROW(min_nested_polygon(line), Error);
}

TEST(NnrankRank3, Robbins) {
  const auto r = nnrank_rank3(robbins_matrix());
  EXPECT_EQ(r.k, 4u);
  EXPECT_TRUE(r.minimal());
  ASSERT_TRUE(std::holds_alternative<ExactFactorization>(r.witness));
  EXPECT_TRUE(verify(robbins_matrix(), std::get<ExactFactorization>(r.witness)));
}

TEST(NnrankRank3, IdentityWitnessIsScaledIdentity) {
  const auto r = nnrank_rank3(ExactMatrix::identity(3));
  EXPECT_EQ(r.k, 3u);
  const auto& f = std::get<ExactFactorization>(r.witness);
  EXPECT_TRUE(verify(ExactMatrix::identity(3), f));
  for (std::size_t i = 0; i < 3; ++i) {
    std::size_t nonzero = 0;
    for (std::size_t j = 0; j < 3; ++j) nonzero += f.left()(i, j) != 0;
    EXPECT_EQ(nonzero, 1u);
  }
}

TEST(NnrankRank3, KernelFourNeedsFourAndOracleAgrees) {
  const auto r = nnrank_rank3(kernel_matrix(4));
  EXPECT_EQ(r.k, 4u);
  EXPECT_TRUE(r.minimal());
  EXPECT_TRUE(verify_any(kernel_matrix(4), r.witness));
  // no nested triangle: no 3-rectangle cover of the support exists, while 4 do
  EXPECT_FALSE(support_has_rectangle_cover(kernel_exact(4), 3));
  EXPECT_TRUE(support_has_rectangle_cover(kernel_exact(4), 4));
  EXPECT_FALSE(support_has_rectangle_cover(robbins_matrix(), 3));
}

TEST(NnrankRank3, AlignedKernels) {
  EXPECT_EQ(nnrank_rank3(kernel_matrix(3)).k, 3u);
  for (std::size_t n : {6, 8}) {
    const auto r = nnrank_rank3(kernel_matrix(n));
    EXPECT_EQ(r.k, n);
    EXPECT_EQ(r.lower_bound, 4u);
    EXPECT_FALSE(r.minimal());
    EXPECT_TRUE(verify_any(kernel_matrix(n), r.witness));
  }
}

TEST(NnrankRank3, NestedPolygonIsOnlyAnUpperBoundAboveFour) {
  // five nonnegative rank-one terms whose L columns leave the column space of K_6
  const ExactMatrix k6 = kernel_exact(6);
  const Rational h(1, 2);
  const ExactMatrix left{{0, h, h, 0, 0}, {0, 1, 0, h, 0}, {0, h, 0, 0, h}, {h, 0, 0, 0, h}, {1, 0, 0, h, 0}, {h, 0, h, 0, 0}};
  const ExactMatrix right{{0, 0, 0, 1, 2, 1}, {1, 2, 1, 0, 0, 0}, {3, 1, 0, 0, 1, 3}, {1, 0, 1, 1, 0, 1}, {0, 1, 3, 3, 1, 0}};
  EXPECT_TRUE(verify(k6, ExactFactorization(left, right)));
  EXPECT_GT(rank_exact(hstack(k6, left)), 3u);
  EXPECT_EQ(nnrank_rank3(k6).k, 6u);
}

TEST(NnrankRank3, SubgridMonotonicity) {
  EXPECT_LE(nnrank_rank3(kernel_matrix(3)).k, nnrank_rank3(kernel_matrix(6)).k);
  EXPECT_LE(nnrank_rank3(kernel_matrix(4)).k, nnrank_rank3(kernel_matrix(8)).k);
  EXPECT_LE(nnrank_rank3(kernel_matrix(6)).k, nnrank_rank3(kernel_matrix(12)).k);
}

TEST(NnrankRank3, InvariantUnderScalingPermutationAndTranspose) {
  std::mt19937_64 gen(41);
  std::uniform_int_distribution<int> pos(1, 6);
  int checked = 0;
  for (int trial = 0; trial < 30 && checked < 12; ++trial) {
    const ExactMatrix t = slack_instance(gen, 4 + trial % 5, 5 + trial % 4);
    if (!t.nonnegative() || rank_exact(t) != 3) continue;
    ++checked;
    const auto base = nnrank_rank3(t);
    EXPECT_GE(base.k, 3u);
    EXPECT_LE(base.k, std::min(t.rows(), t.cols()));
    EXPECT_TRUE(verify_any(t, base.witness));
    EXPECT_LE(polygon_violation(base.instance, base.polygon), geometric_slack);

    std::vector<Rational> dl(t.rows()), dr(t.cols());
    for (auto& x : dl) x = Rational(pos(gen), pos(gen)), x.canonicalize();
    for (auto& x : dr) x = Rational(pos(gen), pos(gen)), x.canonicalize();
    Permutation pl = identity_permutation(t.rows()), pr = identity_permutation(t.cols());
    std::shuffle(pl.begin(), pl.end(), gen);
    std::shuffle(pr.begin(), pr.end(), gen);
    const ExactMatrix s = scale_and_permute<Rational>(t, dl, dr, pl, pr);
    EXPECT_EQ(nnrank_rank3(s).k, base.k);
    EXPECT_EQ(nnrank_rank3(t.transpose()).k, base.k);
    EXPECT_EQ(nnrank_rank3(to_float(t)).k, base.k);
  }
  EXPECT_GE(checked, 8);
}

TEST(NnrankRank3, ThreeTermProductsHaveKThree) {
  std::mt19937_64 gen(77);
  std::uniform_int_distribution<int> num(0, 5);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<Rational> w(6 * 3), h(3 * 7);
    for (auto& x : w) x = num(gen);
    for (auto& x : h) x = num(gen);
    const ExactMatrix t = ExactMatrix(6, 3, w) * ExactMatrix(3, 7, h);
    if (rank_exact(t) != 3) continue;
    const auto r = nnrank_rank3(t);
    EXPECT_EQ(r.k, 3u);
    EXPECT_TRUE(verify_any(t, r.witness));
  }
}
