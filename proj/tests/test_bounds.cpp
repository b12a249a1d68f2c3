#include <gtest/gtest.h>

#include <random>

#include "fixtures.hpp"
#include "gsr/bounds.hpp"
#include "oracles.hpp"

using gsr::Matrix;
using gsr::MatrixSet;
using gsr::Word;

namespace {

Matrix random_with_negative_det(std::mt19937_64& rng) {
  while (true) {
    Matrix m = oracle::random_matrix(rng, 2, -2, 2);
    if (gsr::determinant(m) < -1e-3) return m;
  }
}

MatrixSet offdiag_flip(double a, double b, double c, double d) {
  return MatrixSet({Matrix::from_rows({{a, b}, {c, d}}), Matrix::from_rows({{a, -b}, {-c, d}})});
}

double growth(const MatrixSet& s, const Word& w) { return gsr::growth_rate(s, w); }

}  // namespace

TEST(LowerBound, SingletonDiagonal) {
  const MatrixSet s{Matrix::diagonal({-3.0, 2.0})};
  const auto lb = gsr::lower_bound(s, 1);
  EXPECT_DOUBLE_EQ(lb.value, 3.0);
  EXPECT_EQ(lb.witness, (Word{1}));
  EXPECT_FALSE(lb.partial);
}

TEST(LowerBound, ShearRotationAtDepthTwo) {
  const double expected = std::sqrt(oracle::shear_rotation_top_root());
  EXPECT_NEAR(expected, 2.8794, 1e-4);
  const auto lb = gsr::lower_bound(fixture::shear_rotation(), 2);
  EXPECT_NEAR(lb.value, expected, 1e-12 * expected);
  EXPECT_EQ(lb.witness, (Word{1, 2}));
}

TEST(LowerBound, NegativeDeterminantPairAtDepthTwo) {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 50; ++trial) {
    const MatrixSet s({random_with_negative_det(rng), random_with_negative_det(rng)});
    const double expected = std::max({oracle::rho2(s[0]), oracle::rho2(s[1]), std::sqrt(oracle::rho2(s[0] * s[1]))});
    EXPECT_NEAR(gsr::lower_bound(s, 2).value, expected, 1e-12 * (1 + expected));
  }
}

TEST(LowerBound, BudgetFlagsPartialResult) {
  std::mt19937_64 rng(22);
  const MatrixSet s = oracle::random_set(rng, 3, 2, -1, 1);
  const auto lb = gsr::lower_bound(s, 12, {.budget = 500, .threads = 1});
  EXPECT_TRUE(lb.partial);
  EXPECT_LT(lb.completed_depth, 12);
  EXPECT_GE(lb.completed_depth, 1);
}

TEST(UpperBound, Examples) {
  EXPECT_DOUBLE_EQ(gsr::upper_bound(MatrixSet{Matrix::diagonal({-3.0, 2.0})}, 1).value, 3.0);

  const double expected = std::sqrt(oracle::shear_rotation_top_root());
  const auto ub = gsr::upper_bound(fixture::shear_rotation(), 1);
  EXPECT_NEAR(ub.value, expected, 1e-12 * expected);
  EXPECT_NEAR(ub.value, gsr::lower_bound(fixture::shear_rotation(), 2).value, 1e-12 * expected);

  const MatrixSet sym{Matrix::from_rows({{2, 1}, {1, 2}}), Matrix::from_rows({{0, 2.5}, {2.5, 1}})};
  const double rho = std::max(gsr::spectral_radius(sym[0]), gsr::spectral_radius(sym[1]));
  EXPECT_NEAR(gsr::upper_bound(sym, 1).value, rho, 1e-12 * rho);
}

TEST(UpperBound, BudgetKeepsCompletedDepthsOnly) {
  std::mt19937_64 rng(23);
  const MatrixSet s = oracle::random_set(rng, 3, 2, -1, 1);
  const auto full = gsr::upper_bound(s, 4);
  const auto part = gsr::upper_bound(s, 10, {.budget = 200, .threads = 1});
  EXPECT_TRUE(part.partial);
  ASSERT_GE(part.completed_depth, 1);
  for (int n = 0; n < part.completed_depth && n < 4; ++n)
    EXPECT_DOUBLE_EQ(part.per_depth[static_cast<std::size_t>(n)], full.per_depth[static_cast<std::size_t>(n)]);
  EXPECT_THROW((void)gsr::upper_bound(s, 3, {.budget = 1, .threads = 1}), gsr::Error);
}

TEST(OptimalWordTest, Examples) {
  const auto ex2 = gsr::optimal_word(fixture::shear_rotation(), 1);
  EXPECT_EQ(ex2.word, (Word{1}));
  EXPECT_NEAR(ex2.norm, std::sqrt(oracle::shear_rotation_top_root()), 1e-12);
  EXPECT_EQ(ex2.ties, (std::vector<Word>{{1}, {2}}));

  const auto id = gsr::optimal_word(MatrixSet{Matrix::identity(2)}, 5);
  EXPECT_EQ(id.word, (Word{1, 1, 1, 1, 1}));
  EXPECT_DOUBLE_EQ(id.norm, 1.0);

  const auto dom = gsr::optimal_word(MatrixSet{2.0 * Matrix::identity(2), Matrix::identity(2)}, 3);
  EXPECT_EQ(dom.word, (Word{1, 1, 1}));
  EXPECT_NEAR(dom.norm, 8.0, 1e-12);
}

TEST(OptimalWordTest, MatchesBruteForce) {
  std::mt19937_64 rng(24);
  for (int trial = 0; trial < 30; ++trial) {
    const MatrixSet s = oracle::random_set(rng, 1 + trial % 3, 1 + trial % 3, -2, 2);
    for (int n = 1; n <= 5; ++n) {
      double best = -1;
      Word arg;
      for (const auto& w : oracle::every_word(static_cast<int>(s.size()), n)) {
        const double v = gsr::operator_norm(gsr::evaluate(s, w));
        if (v > best * (1 + 1e-9)) {
          best = v;
          arg = w;
        }
      }
      const auto got = gsr::optimal_word(s, n);
      EXPECT_NEAR(got.norm, best, 1e-10 * best);
      EXPECT_EQ(got.word, arg);
    }
  }
}

TEST(OptimalWordTest, BudgetIsAnError) {
  std::mt19937_64 rng(25);
  const MatrixSet s = oracle::random_set(rng, 4, 2, -1, 1);
  try {
    (void)gsr::optimal_word(s, 10, {.budget = 1000, .threads = 1});
    FAIL();
  } catch (const gsr::Error& e) {
    EXPECT_EQ(e.kind(), gsr::ErrorKind::budget_exceeded);
  }
}

TEST(Refine, TrivialSingleton) {
  const auto r = gsr::refine(MatrixSet{Matrix::diagonal({1.0})}, {.tol = 1e-9});
  EXPECT_EQ(r.lower, 1.0);
  EXPECT_EQ(r.upper, 1.0);
  EXPECT_TRUE(r.converged);
  EXPECT_EQ(r.completed_depth, 1);
}

TEST(Refine, ShearRotationClosesTheGap) {
  const auto r = gsr::refine(fixture::shear_rotation(), {.tol = 1e-9, .budget = 1'000'000});
  EXPECT_TRUE(r.converged);
  EXPECT_LE(r.gap, 1e-9);
  EXPECT_LE(r.completed_depth, 2);
  EXPECT_EQ(gsr::rotate_min(r.lower_witness), (Word{1, 2}));
  EXPECT_NEAR(r.lower, std::sqrt(oracle::shear_rotation_top_root()), 1e-12);
}

TEST(Refine, OffDiagonalFlipWithNegativeProduct) {
  std::mt19937_64 rng(26);
  std::uniform_real_distribution<double> u(-2, 2);
  int checked = 0;
  while (checked < 30) {
    const double a = u(rng), b = u(rng), c = u(rng), d = u(rng);
    if (b * c >= -1e-3) continue;
    const MatrixSet s = offdiag_flip(a, b, c, d);
    const double expected = std::sqrt(oracle::rho2(s[0] * s[1]));
    const auto r = gsr::refine(s, {.tol = 1e-6, .budget = 2'000'000, .max_depth = 16});
    EXPECT_NEAR(r.lower, expected, 1e-6 * (1 + expected)) << a << " " << b << " " << c << " " << d;
    ++checked;
  }
}

TEST(Refine, NegativeDeterminantsAtDepthTwelve) {
  std::mt19937_64 rng(27);
  for (int trial = 0; trial < 30; ++trial) {
    const MatrixSet s({random_with_negative_det(rng), random_with_negative_det(rng)});
    const double expected = std::max({oracle::rho2(s[0]), oracle::rho2(s[1]), std::sqrt(oracle::rho2(s[0] * s[1]))});
    const auto r = gsr::refine(s, {.tol = 1e-9, .budget = 10'000'000, .max_depth = 12});
    EXPECT_NEAR(r.lower, expected, 1e-6 * (1 + expected));
    EXPECT_LE(r.lower, r.upper + 1e-9 * (1 + r.upper));
  }
}

TEST(Refine, BudgetExhaustionIsFlagged) {
  std::mt19937_64 rng(28);
  const MatrixSet s = oracle::random_set(rng, 3, 3, -2, 2);
  const auto r = gsr::refine(s, {.tol = 1e-15, .budget = 2000, .max_depth = 30});
  EXPECT_TRUE(r.partial);
  EXPECT_FALSE(r.converged);
  EXPECT_LE(r.lower, r.upper + 1e-9 * (1 + r.upper));
}

// --- properties over random sets ---

class BoundsProperty : public ::testing::TestWithParam<int> {};

TEST_P(BoundsProperty, SandwichAndMonotonicity) {
  std::mt19937_64 rng(static_cast<std::uint64_t>(GetParam()));
  std::uniform_int_distribution<int> kd(1, 3);
  const MatrixSet s = oracle::random_set(rng, static_cast<std::size_t>(kd(rng)), static_cast<std::size_t>(kd(rng)), -2, 2);
  const auto r = gsr::refine(s, {.tol = 1e-14, .budget = 2'000'000, .max_depth = 8});
  double prev_lower = 0, prev_upper = std::numeric_limits<double>::infinity();
  for (const auto& row : r.per_depth) {
    EXPECT_LE(row.lower, row.upper + 1e-9 * (1 + row.upper));
    EXPECT_GE(row.lower, prev_lower);
    EXPECT_LE(row.upper, prev_upper);
    prev_lower = row.lower;
    prev_upper = row.upper;
  }
  double prev = 0;
  for (int n = 1; n <= 6; ++n) {
    const double v = gsr::lower_bound(s, n).value;
    EXPECT_GE(v, prev);
    prev = v;
  }
}

TEST_P(BoundsProperty, WitnessReproducesLowerBound) {
  std::mt19937_64 rng(static_cast<std::uint64_t>(GetParam()) + 1000);
  const MatrixSet s = oracle::random_set(rng, 2, 3, -2, 2);
  const auto lb = gsr::lower_bound(s, 7);
  EXPECT_NEAR(growth(s, lb.witness), lb.value, 1e-12 * lb.value);
  const auto r = gsr::refine(s, {.tol = 1e-12, .max_depth = 7});
  EXPECT_NEAR(growth(s, r.lower_witness), r.lower, 1e-12 * r.lower);
}

TEST_P(BoundsProperty, ScalingEquivariance) {
  std::mt19937_64 rng(static_cast<std::uint64_t>(GetParam()) + 2000);
  const MatrixSet s = oracle::random_set(rng, 2, 2, -2, 2);
  for (double c : {-3.5, 0.01, 7.0}) {
    const MatrixSet t = s.scaled(c);
    const double ac = std::abs(c);
    EXPECT_NEAR(gsr::lower_bound(t, 6).value, ac * gsr::lower_bound(s, 6).value,
                1e-12 * ac * gsr::lower_bound(s, 6).value);
    EXPECT_NEAR(gsr::upper_bound(t, 6).value, ac * gsr::upper_bound(s, 6).value,
                1e-12 * ac * gsr::upper_bound(s, 6).value);
  }
}

TEST_P(BoundsProperty, PermutationInvariance) {
  std::mt19937_64 rng(static_cast<std::uint64_t>(GetParam()) + 3000);
  const MatrixSet s = oracle::random_set(rng, 3, 2, -2, 2);
  const MatrixSet p({s[2], s[0], s[1]});
  const auto a = gsr::lower_bound(s, 6), b = gsr::lower_bound(p, 6);
  EXPECT_NEAR(a.value, b.value, 1e-12 * a.value);
  EXPECT_NEAR(gsr::upper_bound(s, 5).value, gsr::upper_bound(p, 5).value, 1e-12 * a.value + 1e-300);
  // relabel p's witness back into s's letters: p letter 1 -> s letter 3, 2 -> 1, 3 -> 2
  Word back;
  for (int l : b.witness.letters) back.letters.push_back(l == 1 ? 3 : l - 1);
  EXPECT_NEAR(growth(s, back), a.value, 1e-12 * a.value);
}

TEST_P(BoundsProperty, LyndonScanMatchesAllWords) {
  std::mt19937_64 rng(static_cast<std::uint64_t>(GetParam()) + 4000);
  std::uniform_int_distribution<int> kd(1, 3);
  const std::size_t K = static_cast<std::size_t>(kd(rng));
  const std::size_t d = static_cast<std::size_t>(kd(rng));
  const MatrixSet s = oracle::random_set(rng, K, d, -2, 2);
  const int depth = K == 3 ? 7 : 8;
  const double brute = oracle::brute_lower(s, depth);
  const double lyndon = gsr::lower_bound(s, depth).value;
  EXPECT_LE(std::abs(brute - lyndon), 1e-12 * std::max(1.0, brute));
}

TEST_P(BoundsProperty, ThreadCountDoesNotChangeReports) {
  std::mt19937_64 rng(static_cast<std::uint64_t>(GetParam()) + 5000);
  const MatrixSet s = oracle::random_set(rng, 3, 3, -2, 2);
  const auto a = gsr::refine(s, {.tol = 1e-12, .budget = 300'000, .max_depth = 9, .threads = 1});
  const auto b = gsr::refine(s, {.tol = 1e-12, .budget = 300'000, .max_depth = 9, .threads = 4});
  EXPECT_EQ(a.lower, b.lower);
  EXPECT_EQ(a.upper, b.upper);
  EXPECT_EQ(a.lower_witness, b.lower_witness);
  EXPECT_EQ(a.completed_depth, b.completed_depth);
  EXPECT_EQ(a.partial, b.partial);
  EXPECT_EQ(a.nodes, b.nodes);
  ASSERT_EQ(a.per_depth.size(), b.per_depth.size());
  for (std::size_t i = 0; i < a.per_depth.size(); ++i) {
    EXPECT_EQ(a.per_depth[i].upper_at, b.per_depth[i].upper_at);
    EXPECT_EQ(a.per_depth[i].lower_at, b.per_depth[i].lower_at);
  }
  const auto la = gsr::lower_bound(s, 6, {.threads = 1}), lb = gsr::lower_bound(s, 6, {.threads = 3});
  EXPECT_EQ(la.value, lb.value);
  EXPECT_EQ(la.witness, lb.witness);
}

INSTANTIATE_TEST_SUITE_P(Seeds, BoundsProperty, ::testing::Range(1, 21));

TEST(ScaledUpper, IsAValidBoundAndNeverWorse) {
  std::mt19937_64 rng(29);
  for (int trial = 0; trial < 10; ++trial) {
    const MatrixSet s = oracle::random_set(rng, 2, 2, -2, 2);
    const auto plain = gsr::upper_bound(s, 4);
    const auto scaled = gsr::scaled_upper_bound(s, 4);
    const double lower = gsr::lower_bound(s, 8).value;
    EXPECT_LE(lower, scaled.value + 1e-9 * (1 + lower));
    EXPECT_LE(scaled.bound.per_depth[0], plain.per_depth[0] * (1 + 1e-12));
  }
  // diag(1,2)-conjugated upper triangular pair: scaling pulls the depth-1 bound down to rho
  const MatrixSet tri{Matrix::from_rows({{1, 8}, {0, 0.5}})};
  const auto sc = gsr::scaled_upper_bound(tri, 1);
  EXPECT_LT(sc.value, gsr::upper_bound(tri, 1).value);
}
