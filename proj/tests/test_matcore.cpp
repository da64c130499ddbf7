#include <gtest/gtest.h>

#include <numeric>
#include <random>

#include "nnrank/matcore.hpp"

using namespace nnrank;

namespace {

ExactMatrix circ2101() { return circulant<Rational>({2, 1, 0, 1}); }

ExactMatrix random_rational(std::mt19937_64& gen, std::size_t m, std::size_t n, int zero_odds) {
  std::uniform_int_distribution<int> num(0, 9), den(1, 5), z(0, zero_odds);
  std::vector<Rational> e(m * n);
  for (auto& x : e) {
    x = z(gen) == 0 ? Rational(0) : Rational(num(gen), den(gen));
    x.canonicalize();
  }
  return ExactMatrix(m, n, std::move(e));
}

}  // namespace

TEST(RankExact, RobbinsIsThree) { EXPECT_EQ(rank_exact(robbins_matrix()), 3u); }

TEST(RankExact, ZeroMatrixIsZero) { EXPECT_EQ(rank_exact(ExactMatrix(4, 4)), 0u); }

TEST(RankExact, CirculantWithOneZeroEigenvalue) {
  // eigenvalues 2 + w + w^3 over the 4th roots of unity: 4, 2, 0, 2
  EXPECT_EQ(rank_exact(circ2101()), 3u);
}

TEST(RankExact, HandlesFractionsAndWideMatrices) {
  const ExactMatrix m{{Rational(1, 3), Rational(2, 3), 1, 0, 5}, {Rational(1, 6), Rational(1, 3), Rational(1, 2), 0, Rational(5, 2)}};
  EXPECT_EQ(rank_exact(m), 1u);
  EXPECT_EQ(rank_exact(ExactMatrix::identity(5)), 5u);
}

TEST(RankExact, TransposeInvariance) {
  std::mt19937_64 gen(7);
  for (int trial = 0; trial < 50; ++trial) {
    const ExactMatrix m = random_rational(gen, 1 + trial % 6, 1 + (trial * 5) % 7, 2);
    EXPECT_EQ(rank_exact(m), rank_exact(m.transpose()));
  }
}

TEST(RankExact, MatchesProductConstruction) {
  std::mt19937_64 gen(11);
  for (std::size_t r = 0; r <= 4; ++r) {
    const ExactMatrix a = random_rational(gen, 6, r, 1000), b = random_rational(gen, r, 7, 1000);
    EXPECT_LE(rank_exact(r == 0 ? ExactMatrix(6, 7) : a * b), r);
  }
}

TEST(RankFloat, Examples) {
  EXPECT_EQ(rank_float(FloatMatrix::identity(3)), 3u);
  EXPECT_EQ(rank_float(to_float(circ2101())), 3u);
  EXPECT_EQ(rank_float(FloatMatrix(3, 5)), 0u);
}

TEST(RankFloat, KernelOnSixtyFourPointsIsThree) {
  const GridSpec g(64);
  const FloatMatrix k = sample_kernel(g, g);
  EXPECT_EQ(rank_float(k, 1e-8), 3u);
  // K = C D with C = [cos s, sin s, 1]; its coefficient matrix has exact rank 3
  std::vector<double> c;
  for (double s : g.points()) {
    c.push_back(std::cos(s));
    c.push_back(std::sin(s));
    c.push_back(1.0);
  }
  EXPECT_EQ(rank_exact(to_exact(FloatMatrix(64, 3, c))), 3u);
}

TEST(RankFloat, KernelIsRankThreeForEveryGridSize) {
  for (std::size_t n = 3; n <= 40; ++n) {
    for (double offset : {0.0, 0.3 * two_pi / static_cast<double>(n)}) {
      const GridSpec g(n, offset);
      EXPECT_EQ(rank_float(sample_kernel(g, g)), 3u) << "n=" << n << " offset=" << offset;
    }
  }
}

TEST(GridSpec, PointsAndValidation) {
  const GridSpec g(8, 0.1);
  const auto t = g.points();
  ASSERT_EQ(t.size(), 8u);
  EXPECT_DOUBLE_EQ(t[0], 0.1);
  for (std::size_t i = 1; i < t.size(); ++i) EXPECT_NEAR(t[i] - t[i - 1], two_pi / 8.0, 1e-15);
  EXPECT_DOUBLE_EQ(g.weight(), two_pi / 8.0);
  EXPECT_THROW(GridSpec(0), Error);
  EXPECT_THROW(GridSpec(4, two_pi / 4.0), Error);
  EXPECT_THROW(GridSpec(4, -0.1), Error);
}

TEST(CosOfTurns, ExactAtQuarterAndSixthTurns) {
  EXPECT_EQ(cos_of_turns(0, 5), 1.0);
  EXPECT_EQ(cos_of_turns(1, 4), 0.0);
  EXPECT_EQ(cos_of_turns(3, 4), 0.0);
  EXPECT_EQ(cos_of_turns(1, 2), -1.0);
  EXPECT_EQ(cos_of_turns(1, 3), -0.5);
  EXPECT_EQ(cos_of_turns(-1, 6), 0.5);
  EXPECT_EQ(cos_of_turns(14, 12), 0.5);
  EXPECT_NEAR(cos_of_turns(1, 8), std::sqrt(0.5), 1e-16);
  EXPECT_NEAR(cos_of_turns(7, 8), std::sqrt(0.5), 1e-16);
}

TEST(SampleKernel, SmallGrids) {
  const auto k2 = sample_kernel(GridSpec(2), GridSpec(2));
  EXPECT_EQ(k2, (FloatMatrix{{2, 0}, {0, 2}}));
  const auto k3 = sample_kernel(GridSpec(3), GridSpec(3));
  EXPECT_EQ(k3, to_float(circulant<Rational>({2, Rational(1, 2), Rational(1, 2)})));
  const auto k4 = sample_kernel(GridSpec(4), GridSpec(4));
  EXPECT_EQ(k4, to_float(circ2101()));
}

TEST(SampleKernel, RangeSymmetryAndShape) {
  const GridSpec s(7, 0.2), t(5, 0.05);
  const auto k = sample_kernel(s, t);
  EXPECT_EQ(k.rows(), 7u);
  EXPECT_EQ(k.cols(), 5u);
  for (double x : k.entries()) {
    EXPECT_GE(x, 0.0);
    EXPECT_LE(x, 2.0);
  }
  const GridSpec g(9, 0.3);
  const auto sym = sample_kernel(g, g);
  EXPECT_EQ(sym, sym.transpose());
}

TEST(SampleKernel, SmallGridIsSubmatrixOfDoubledGrid) {
  for (std::size_t n : {3, 4, 5, 6}) {
    const auto small = sample_kernel(GridSpec(n), GridSpec(n));
    const auto big = sample_kernel(GridSpec(2 * n), GridSpec(2 * n));
    std::vector<std::size_t> even(n);
    for (std::size_t i = 0; i < n; ++i) even[i] = 2 * i;
    EXPECT_EQ(big.select(even, even), small);
  }
}

TEST(ScaleAndPermute, IdentityLeavesMatrixUnchanged) {
  const ExactMatrix m = robbins_matrix();
  const std::vector<Rational> ones(4, Rational(1));
  const auto id = identity_permutation(4);
  EXPECT_EQ(scale_and_permute<Rational>(m, ones, ones, id, id), m);
}

TEST(ScaleAndPermute, DoublesFirstRow) {
  const ExactMatrix m = robbins_matrix();
  const std::vector<Rational> d{2, 1, 1, 1}, ones(4, Rational(1));
  const auto id = identity_permutation(4);
  const ExactMatrix expected{{2, 2, 0, 0}, {1, 0, 1, 0}, {0, 1, 0, 1}, {0, 0, 1, 1}};
  EXPECT_EQ(scale_and_permute<Rational>(m, d, ones, id, id), expected);
}

TEST(ScaleAndPermute, CyclicRowShiftKeepsRank) {
  const ExactMatrix m = circ2101();
  const std::vector<Rational> ones(4, Rational(1));
  const Permutation shift{1, 2, 3, 0};
  const ExactMatrix shifted = scale_and_permute<Rational>(m, ones, ones, shift, identity_permutation(4));
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j) EXPECT_EQ(shifted(i, j), m((i + 1) % 4, j));
  EXPECT_EQ(rank_exact(shifted), 3u);
}

TEST(ScaleAndPermute, RankInvariantOnRandomInstances) {
  std::mt19937_64 gen(3);
  std::uniform_int_distribution<int> pos(1, 7);
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t m = 2 + trial % 5, n = 2 + (trial * 3) % 6;
    const ExactMatrix t = random_rational(gen, m, n, 1);
    std::vector<Rational> dl(m), dr(n);
    for (auto& x : dl) x = Rational(pos(gen), pos(gen)), x.canonicalize();
    for (auto& x : dr) x = Rational(pos(gen), pos(gen)), x.canonicalize();
    Permutation pl = identity_permutation(m), pr = identity_permutation(n);
    std::shuffle(pl.begin(), pl.end(), gen);
    std::shuffle(pr.begin(), pr.end(), gen);
    const ExactMatrix s = scale_and_permute<Rational>(t, dl, dr, pl, pr);
    EXPECT_EQ(rank_exact(s), rank_exact(t));
    EXPECT_TRUE(s.nonnegative());
  }
}

TEST(ScaleAndPermute, RejectsNonpositiveScalingAndBadPermutations) {
  const ExactMatrix m = robbins_matrix();
  const std::vector<Rational> ones(4, Rational(1)), bad{1, 0, 1, 1};
  const auto id = identity_permutation(4);
  EXPECT_THROW(scale_and_permute<Rational>(m, bad, ones, id, id), Error);
  EXPECT_THROW(scale_and_permute<Rational>(m, ones, ones, Permutation{0, 0, 1, 2}, id), Error);
  EXPECT_THROW(scale_and_permute<Rational>(m, ones, ones, Permutation{0, 1, 2}, id), Error);
}

TEST(Matrix, RejectsNonFiniteAndBadShapes) {
  EXPECT_THROW(FloatMatrix(1, 2, {1.0, std::nan("")}), Error);
  EXPECT_THROW(FloatMatrix(1, 1, {std::numeric_limits<double>::infinity()}), Error);
  EXPECT_THROW(FloatMatrix(2, 2, {1.0, 2.0, 3.0}), Error);
  EXPECT_THROW((FloatMatrix{{1.0, 2.0}, {3.0}}), Error);
}

TEST(Matrix, ExactEntriesAreCanonical) {
  const ExactMatrix m(1, 2, {Rational(10, 2), Rational(15, 3)});
  EXPECT_EQ(m(0, 0).get_str(), "5");
  EXPECT_EQ((m * ExactMatrix(2, 1, {Rational(4, 2), Rational(0)}))(0, 0), Rational(10));
}

TEST(Rational, ToDoubleRoundsToNearest) {
  EXPECT_EQ(to_double(Rational(1, 10)), 0.1);
  EXPECT_EQ(to_double(Rational(2, 3)), 2.0 / 3.0);
  EXPECT_EQ(to_double(Rational(-1, 3)), -1.0 / 3.0);
  EXPECT_EQ(to_double(parse_rational("1.0000000000000001e-300")), 1e-300);
  EXPECT_EQ(to_double(rational_from_double(0.7)), 0.7);
}
