#include <gtest/gtest.h>

#include <random>

#include "eoptd/ball.hpp"
#include "eoptd/cube.hpp"
#include "eoptd/design.hpp"
#include "eoptd/spectrum.hpp"
#include "test_support.hpp"

using namespace eoptd;

namespace {

Design<Rational> interval_design() {
  return Design<Rational>(1, Space::cube, {{Rational(-1)}, {Rational(1)}, {Rational(0)}},
                          {frac(1, 5), frac(1, 5), frac(3, 5)});
}

Matrix<Rational> from_rows(const std::vector<std::vector<Rational>>& rows) {
  Matrix<Rational> M(rows.size(), rows[0].size());
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows[i].size(); ++j) M(i, j) = rows[i][j];
  return M;
}

}  // namespace

TEST(Design, Invariants) {
  EXPECT_THROW(Design<Rational>(1, Space::cube, {{Rational(0)}}, {frac(1, 2)}), std::invalid_argument);
  EXPECT_THROW(Design<Rational>(1, Space::cube, {{Rational(2)}}, {Rational(1)}), std::invalid_argument);
  EXPECT_THROW(Design<Rational>(2, Space::ball, {{Rational(1), Rational(1)}}, {Rational(1)}), std::invalid_argument);
  EXPECT_THROW(Design<Rational>(1, Space::cube, {{Rational(0)}, {Rational(1)}}, {frac(3, 2), frac(-1, 2)}),
               std::invalid_argument);
  EXPECT_THROW(Design<double>(1, Space::cube, {{0.0}}, {1.0 + 1e-9}), std::invalid_argument);
  EXPECT_NO_THROW(Design<double>(1, Space::cube, {{0.0}}, {1.0 + 1e-13}));
}

TEST(Design, DuplicatesAreMerged) {
  Design<Rational> d(1, Space::cube, {{Rational(1)}, {Rational(0)}, {Rational(1)}}, {frac(1, 4), frac(1, 2), frac(1, 4)});
  EXPECT_EQ(d.size(), 2u);
  ASSERT_EQ(d.warnings().size(), 1u);
  EXPECT_NE(d.warnings()[0].find("merged 1"), std::string::npos);
  EXPECT_EQ(d.weights()[0], frac(1, 2));
  EXPECT_EQ(d.weights()[1], frac(1, 2));
}

TEST(InformationMatrix, IntervalDesign) {
  auto M = information_matrix(ModelSpec(1), interval_design());
  // ordering (1, x^2, x)
  EXPECT_EQ(M.entries, from_rows({{1, frac(2, 5), 0}, {frac(2, 5), frac(2, 5), 0}, {0, 0, frac(2, 5)}}));
}

TEST(InformationMatrix, PointMassAtOrigin) {
  Design<Rational> d(3, Space::cube, {{Rational(0), Rational(0), Rational(0)}}, {Rational(1)});
  auto M = information_matrix(ModelSpec(3), d);
  for (std::size_t i = 0; i < 10; ++i)
    for (std::size_t j = 0; j < 10; ++j) EXPECT_EQ(M.entries(i, j), (i == 0 && j == 0) ? Rational(1) : Rational(0));
  EXPECT_EQ(moments_of(ModelSpec(3), d), (SymmetricMoments<Rational>{0, 0, 0}));
}

TEST(InformationMatrix, TraceIdentity) {
  const ModelSpec s(3);
  auto d = expand_design(minimal_support_design(3));
  auto M = information_matrix(s, d);
  Rational trace = 0, expected = 0;
  for (int i = 0; i < s.m(); ++i) trace += M.entries(i, i);
  for (std::size_t p = 0; p < d.size(); ++p) {
    auto f = regression_vector<Rational>(s, d.points()[p]);
    expected += d.weights()[p] * dot<Rational>(f, f);
  }
  EXPECT_EQ(trace, expected);
}

TEST(SymmetricInfoMatrix, MatchesBruteForceOnBarycenterDesigns) {
  for (int k = 1; k <= 6; ++k) {
    const ModelSpec s(k);
    for (const auto& sol : enumerate_feasible_triples(k)) {
      if (sol.support_count() > 3000) continue;
      auto d = expand_design(sol);
      auto mom = moments_of(s, d);
      EXPECT_EQ(mom.a, frac(2, 5));
      EXPECT_EQ(mom.c, frac(2, 5));
      if (k >= 2) EXPECT_EQ(mom.b, frac(1, 5));
      EXPECT_EQ(information_matrix(s, d).entries, symmetric_info_matrix(s, mom).entries);
    }
  }
}

TEST(SymmetricInfoMatrix, IntervalCase) {
  auto M = symmetric_info_matrix(ModelSpec(1), SymmetricMoments<Rational>{frac(2, 5), 0, frac(2, 5)});
  EXPECT_EQ(M.entries, information_matrix(ModelSpec(1), interval_design()).entries);
}

TEST(SymmetricInfoMatrix, BallExampleMatrix) {
  // reference from an independent symbolic computation over the 9 support points
  auto M = symmetric_info_matrix(ModelSpec(2), SymmetricMoments<Rational>{frac(3, 10), frac(1, 10), frac(2, 10)});
  EXPECT_EQ(M.entries, from_rows({{1, frac(3, 10), frac(3, 10), 0, 0, 0},
                                  {frac(3, 10), frac(1, 5), frac(1, 10), 0, 0, 0},
                                  {frac(3, 10), frac(1, 10), frac(1, 5), 0, 0, 0},
                                  {0, 0, 0, frac(3, 10), 0, 0},
                                  {0, 0, 0, 0, frac(3, 10), 0},
                                  {0, 0, 0, 0, 0, frac(1, 10)}}));
}

TEST(MomentsOf, TableDesignK4) {
  auto sol = minimal_support_design(4);
  ASSERT_EQ(sol.depths, (std::vector<int>{0, 3}));
  auto mom = moments_of(ModelSpec(4), expand_design(sol));
  EXPECT_EQ(mom, (SymmetricMoments<Rational>{frac(2, 5), frac(1, 5), frac(2, 5)}));
}

TEST(MomentsOf, BallDesignK2) {
  auto mom = to_rational_moments(moments_of(ModelSpec(2), optimal_ball_design(2)));
  EXPECT_EQ(mom, (SymmetricMoments<Rational>{frac(3, 10), frac(1, 10), frac(2, 10)}));
}

TEST(IsSymmetric, Diagnostics) {
  Design<Rational> d(2, Space::cube, {{Rational(1), Rational(0)}}, {Rational(1)});
  auto chk = is_symmetric(ModelSpec(2), d);
  EXPECT_FALSE(chk.symmetric);
  EXPECT_EQ(chk.diagnostic, "odd moment E[x1] = 1, expected 0");
  EXPECT_THROW(moments_of(ModelSpec(2), d), SymmetryError);

  Design<Rational> e(2, Space::cube, {{Rational(1), Rational(0)}, {Rational(-1), Rational(0)}}, {frac(1, 2), frac(1, 2)});
  auto chk2 = is_symmetric(ModelSpec(2), e);
  EXPECT_FALSE(chk2.symmetric);
  EXPECT_NE(chk2.diagnostic.find("x2^2"), std::string::npos);

  EXPECT_TRUE(is_symmetric(ModelSpec(3), expand_design(minimal_support_design(3))).symmetric);
  EXPECT_TRUE(is_symmetric(ModelSpec(3), optimal_ball_design(3)).symmetric);
}

TEST(IsSymmetric, FloatingTolerance) {
  Design<double> d(1, Space::cube, {{-1.0}, {1.0 - 1e-14}, {0.0}}, {0.2, 0.2, 0.6});
  EXPECT_FALSE(is_symmetric(ModelSpec(1), d, 0.0).symmetric);
  EXPECT_TRUE(is_symmetric(ModelSpec(1), d, 1e-12).symmetric);
}

TEST(DeterminantSymmetric, Examples) {
  EXPECT_EQ(determinant_symmetric(ModelSpec(1), SymmetricMoments<Rational>{frac(2, 5), 0, frac(2, 5)}), frac(12, 125));
  // value from a symbolic determinant of the full 6x6 matrix
  EXPECT_EQ(determinant_symmetric(ModelSpec(2), SymmetricMoments<Rational>{frac(2, 5), frac(1, 5), frac(2, 5)}),
            frac(28, 15625));
  for (int k = 2; k <= 5; ++k)
    EXPECT_EQ(determinant_symmetric(ModelSpec(k), SymmetricMoments<Rational>{frac(1, 3), 0, frac(1, 4)}), Rational(0));
}

TEST(DeterminantSymmetric, AgreesWithElimination) {
  std::mt19937_64 rng(11);
  for (int rep = 0; rep < 100; ++rep) {
    const int k = 2 + rep % 5;
    const ModelSpec s(k);
    auto mom = testutil::random_valid_moments(rng, k);
    auto M = symmetric_info_matrix(s, mom);
    const Rational closed = determinant_symmetric(s, mom);
    EXPECT_EQ(closed, determinant(M.entries));
    const double num = determinant(to_double_matrix(M.entries));
    EXPECT_NEAR(num, closed.convert_to<double>(), 1e-10 * std::abs(closed.convert_to<double>()));
  }
}

TEST(MomentInequalities, Examples) {
  EXPECT_TRUE(check_moment_inequalities(SymmetricMoments<Rational>{frac(2, 5), frac(1, 5), frac(2, 5)}, 3));
  EXPECT_FALSE(check_moment_inequalities(SymmetricMoments<Rational>{frac(1, 5), frac(2, 5), frac(1, 5)}, 3));
  EXPECT_FALSE(check_moment_inequalities(SymmetricMoments<Rational>{1, 0, 1}, 3));
  EXPECT_TRUE(check_moment_inequalities(SymmetricMoments<Rational>{frac(2, 5), 0, frac(2, 5)}, 1));
  EXPECT_FALSE(check_moment_inequalities(SymmetricMoments<Rational>{frac(2, 5), 0, frac(4, 25)}, 1));
}

TEST(InformationMatrix, PositiveSemidefinite) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int k = 1; k <= 5; ++k) {
    std::vector<Point<double>> pts(12, Point<double>(k));
    std::vector<double> w(12, 1.0 / 12);
    for (auto& p : pts)
      for (auto& v : p) v = u(rng);
    auto M = information_matrix(ModelSpec(k), Design<double>(k, Space::cube, pts, w));
    for (double ev : eigen_sym(M.entries).values) EXPECT_GE(ev, -1e-12);
  }
}
