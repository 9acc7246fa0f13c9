#include "oracles.hpp"
#include "tbss/eval.hpp"

#include <gtest/gtest.h>

using namespace tbss;

TEST(Kron, MatchesOracleOrder) {
  std::mt19937_64 rng(1);
  const std::vector<Matrix> mats{oracle::random_matrix(3, 3, rng), oracle::random_matrix(2, 2, rng),
                                 oracle::random_matrix(2, 2, rng)};
  const Matrix expected = oracle::kron(mats[2], oracle::kron(mats[1], mats[0]));
  EXPECT_LT((kron_unmixing(mats) - expected).cwiseAbs().maxCoeff(), 1e-14);
  EXPECT_EQ(kron_unmixing(std::vector<Matrix>{mats[0]}), mats[0]);
}

TEST(Assignment, SmallKnownCase) {
  Matrix cost(3, 3);
  cost << 4, 1, 3, 2, 0, 5, 3, 2, 2;
  const std::vector<Index> a = solve_assignment(cost);
  EXPECT_EQ(a, (std::vector<Index>{1, 0, 2}));
}

TEST(Assignment, MatchesBruteForce) {
  std::mt19937_64 rng(2);
  for (int rep = 0; rep < 50; ++rep) {
    const Index p = 2 + rep % 5;
    const Matrix cost = oracle::random_matrix(p, p, rng);
    const std::vector<Index> a = solve_assignment(cost);
    double got = 0.0;
    for (Index i = 0; i < p; ++i) got += cost(i, a[static_cast<std::size_t>(i)]);
    std::vector<Index> perm(static_cast<std::size_t>(p));
    std::iota(perm.begin(), perm.end(), Index{0});
    double best = std::numeric_limits<double>::infinity();
    do {
      double c = 0.0;
      for (Index i = 0; i < p; ++i) c += cost(i, perm[static_cast<std::size_t>(i)]);
      best = std::min(best, c);
    } while (std::next_permutation(perm.begin(), perm.end()));
    EXPECT_NEAR(got, best, 1e-12);
  }
}

TEST(Mdi, ZeroForExactInverseUpToPjd) {
  std::mt19937_64 rng(3);
  for (Index p : {2, 5, 12}) {
    const Matrix omega = oracle::random_matrix(p, p, rng);
    const Matrix gamma = oracle::random_pjd(p, rng) * omega.inverse();
    EXPECT_LT(mdi(gamma, omega).value, 1e-7);
  }
  EXPECT_EQ(mdi(Matrix::Identity(4, 4), Matrix::Identity(4, 4)).value, 0.0);
}

TEST(Mdi, MatchesBruteForce) {
  std::mt19937_64 rng(4);
  for (int rep = 0; rep < 60; ++rep) {
    const Index p = 2 + rep % 6;
    const Matrix gamma = oracle::random_matrix(p, p, rng);
    const Matrix omega = oracle::random_matrix(p, p, rng);
    EXPECT_NEAR(mdi(gamma, omega).value, oracle::mdi_brute_force(gamma, omega), 1e-12);
  }
}

TEST(Mdi, WorstCaseIsOne) {
  // Every row spreads evenly over all columns.
  const Index p = 4;
  Matrix h(p, p);
  h << 1, 1, 1, 1, 1, -1, 1, -1, 1, 1, -1, -1, 1, -1, -1, 1;
  EXPECT_NEAR(mdi(h, Matrix::Identity(p, p)).value, 1.0, 1e-12);
}

TEST(Mdi, ReportsAssignment) {
  Matrix g = Matrix::Zero(3, 3);
  g(0, 2) = 2.0;
  g(1, 0) = -1.0;
  g(2, 1) = 0.5;
  const MdiValue v = mdi(g, Matrix::Identity(3, 3));
  EXPECT_EQ(v.assignment, (std::vector<Index>{1, 2, 0}));
  EXPECT_LT((v.row_scores.array() - 1.0).abs().maxCoeff(), 1e-15);
}

TEST(Mdi, RejectsBadInput) {
  EXPECT_THROW(mdi(Matrix::Identity(1, 1), Matrix::Identity(1, 1)), std::invalid_argument);
  EXPECT_THROW(mdi(Matrix::Identity(3, 3), Matrix::Identity(2, 2)), std::invalid_argument);
  Matrix z = Matrix::Identity(3, 3);
  z.row(1).setZero();
  EXPECT_THROW(mdi(z, Matrix::Identity(3, 3)), std::invalid_argument);
}

TEST(Correlation, FindsBestComponent) {
  std::mt19937_64 rng(5);
  const Matrix targets = oracle::random_matrix(2, 300, rng);
  Matrix comps = oracle::random_matrix(4, 300, rng);
  comps.row(2) = -3.0 * targets.row(0);
  comps.row(3).setConstant(1.0);
  std::vector<Index> skipped;
  const auto matches = max_abs_correlations(comps, targets, &skipped);
  ASSERT_EQ(matches.size(), 2u);
  EXPECT_EQ(matches[0].component, 2);
  EXPECT_NEAR(matches[0].max_abs_corr, 1.0, 1e-12);
  EXPECT_LT(matches[1].max_abs_corr, 0.3);
  EXPECT_EQ(skipped, std::vector<Index>{3});
}

TEST(Kurtosis, KnownValuesAndRanking) {
  Vector two_point(4);
  two_point << 1, -1, 1, -1;
  EXPECT_NEAR(excess_kurtosis(two_point), -2.0, 1e-14);

  std::mt19937_64 rng(6);
  Matrix d = oracle::random_matrix(6, 2000, rng);
  d.row(4) = d.row(4).array().pow(3);  // heavy tails
  d.row(1).setConstant(2.0);
  const KurtosisRanking r = kurtosis_rank(TensorSeries({3, 2}, d));
  ASSERT_EQ(r.ranked.size(), 5u);
  EXPECT_EQ(r.ranked.front().component, 4);
  EXPECT_EQ(r.ranked.front().cell, (Dims{1, 1}));
  EXPECT_EQ(r.excluded, std::vector<Index>{1});
  for (std::size_t k = 1; k < r.ranked.size(); ++k) EXPECT_GE(r.ranked[k - 1].excess_kurtosis, r.ranked[k].excess_kurtosis);
}
