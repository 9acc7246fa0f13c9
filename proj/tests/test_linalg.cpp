#include "oracles.hpp"
#include "tbss/linalg.hpp"

#include <gtest/gtest.h>

using namespace tbss;

namespace {

Matrix random_spd(Index p, std::mt19937_64& rng) {
  const Matrix a = oracle::random_matrix(p, p, rng);
  return a * a.transpose() + 0.1 * Matrix::Identity(p, p);
}

std::vector<Matrix> planted_set(const Matrix& u, int k, std::mt19937_64& rng) {
  std::vector<Matrix> out;
  for (int n = 0; n < k; ++n) {
    const Vector d = oracle::random_matrix(u.rows(), 1, rng).col(0);
    out.push_back(u * d.asDiagonal() * u.transpose());
  }
  return out;
}

}  // namespace

TEST(Linalg, SymEigenDescendingAndReconstructs) {
  std::mt19937_64 rng(1);
  const Matrix s = random_spd(6, rng);
  const SymEigen e = sym_eigen(s);
  for (Index k = 1; k < 6; ++k) EXPECT_GE(e.values[k - 1], e.values[k]);
  EXPECT_LT((e.vectors * e.values.asDiagonal() * e.vectors.transpose() - s).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(Linalg, SymEigenRejectsAsymmetric) {
  Matrix m = Matrix::Identity(3, 3);
  m(0, 1) = 1.0;
  EXPECT_THROW(sym_eigen(m), std::invalid_argument);
}

TEST(Linalg, InverseSqrtWhitens) {
  std::mt19937_64 rng(2);
  const Matrix s = random_spd(5, rng);
  const Matrix w = sym_inv_sqrt(s);
  EXPECT_LT((w - w.transpose()).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LT((w * s * w - Matrix::Identity(5, 5)).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(Linalg, InverseSqrtRankDeficient) {
  Matrix s = Matrix::Zero(3, 3);
  s(0, 0) = 1.0;
  s(1, 1) = 1.0;
  try {
    sym_inv_sqrt(s);
    FAIL() << "expected RankDeficiencyError";
  } catch (const RankDeficiencyError& e) {
    EXPECT_LE(e.ratio(), kRankFloor);
    EXPECT_EQ(e.mode(), -1);
  }
}

TEST(Linalg, JointDiagRecoversPlantedRotation) {
  std::mt19937_64 rng(3);
  for (Index p : {2, 3, 6, 12}) {
    const Matrix u = oracle::random_orthogonal(p, rng);
    const std::vector<Matrix> set = planted_set(u, 13, rng);
    const JointDiagResult r = joint_diagonalize(set);
    EXPECT_TRUE(r.converged);
    EXPECT_LT(oracle::column_match_error(r.rotation, u), 1e-8) << "p=" << p;
    EXPECT_LT(off_diagonal_mass(set, r.rotation), 1e-12);
    EXPECT_LT((r.rotation.transpose() * r.rotation - Matrix::Identity(p, p)).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(Linalg, JointDiagTraceNonDecreasing) {
  std::mt19937_64 rng(4);
  std::vector<Matrix> set;
  for (int k = 0; k < 8; ++k) {
    const Matrix a = oracle::random_matrix(7, 7, rng);
    set.push_back(a + a.transpose());
  }
  const JointDiagResult r = joint_diagonalize(set);
  ASSERT_GE(r.trace.size(), 2u);
  for (std::size_t k = 1; k < r.trace.size(); ++k) EXPECT_GE(r.trace[k], r.trace[k - 1] - 1e-12 * r.trace[k - 1]);
  EXPECT_NEAR(r.objective, diagonal_objective(set, r.rotation), 1e-9 * r.objective);
}

TEST(Linalg, JointDiagOrderingAndSignConvention) {
  std::mt19937_64 rng(5);
  const Matrix u = oracle::random_orthogonal(5, rng);
  const std::vector<Matrix> set = planted_set(u, 4, rng);
  const JointDiagResult r = joint_diagonalize(set);
  const Vector d = (r.rotation.transpose() * set.front() * r.rotation).diagonal();
  for (Index k = 1; k < 5; ++k) EXPECT_GE(d[k - 1], d[k]);
  for (Index k = 0; k < 5; ++k) {
    Index arg = 0;
    r.rotation.col(k).cwiseAbs().maxCoeff(&arg);
    EXPECT_GT(r.rotation(arg, k), 0.0);
  }
}

TEST(Linalg, JointDiagSymmetrizesInput) {
  std::mt19937_64 rng(6);
  const Matrix u = oracle::random_orthogonal(4, rng);
  std::vector<Matrix> set = planted_set(u, 3, rng);
  const Matrix skew = [&] {
    const Matrix a = oracle::random_matrix(4, 4, rng);
    return Matrix(a - a.transpose());
  }();
  std::vector<Matrix> perturbed = set;
  perturbed[0] += skew;
  const JointDiagResult a = joint_diagonalize(set);
  const JointDiagResult b = joint_diagonalize(perturbed);
  EXPECT_LT((a.rotation - b.rotation).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(Linalg, JointDiagSingleMatrixIsEigendecomposition) {
  std::mt19937_64 rng(7);
  const Matrix s = random_spd(4, rng);
  const std::vector<Matrix> set{s};
  const JointDiagResult r = joint_diagonalize(set);
  const SymEigen e = sym_eigen(s);
  EXPECT_LT(oracle::column_match_error(r.rotation, e.vectors), 1e-8);
}

TEST(Linalg, JointDiagRotatesWithTheSet) {
  // Noisy sets, so the optimum is not exact; rotating the set rotates U.
  std::mt19937_64 rng(9);
  const Index p = 8;
  std::vector<Matrix> set;
  for (int k = 0; k < 6; ++k) {
    const Matrix a = oracle::random_matrix(p, p, rng);
    set.push_back(a + a.transpose());
  }
  const Matrix o = oracle::random_orthogonal(p, rng);
  std::vector<Matrix> rotated;
  for (const Matrix& m : set) rotated.push_back(o * m * o.transpose());
  const JointDiagResult a = joint_diagonalize(set);
  const JointDiagResult b = joint_diagonalize(rotated);
  EXPECT_LT(oracle::column_match_error(o.transpose() * b.rotation, a.rotation), 1e-8);
  EXPECT_NEAR(a.objective, b.objective, 1e-9 * a.objective);
}

TEST(Linalg, JointDiagNeverEndsBelowIdentity) {
  std::mt19937_64 rng(10);
  for (int rep = 0; rep < 20; ++rep) {
    std::vector<Matrix> set;
    for (int k = 0; k < 3; ++k) {
      const Matrix a = oracle::random_matrix(5, 5, rng);
      set.push_back(a + a.transpose());
    }
    EXPECT_GE(joint_diagonalize(set).objective, diagonal_objective(set, Matrix::Identity(5, 5)) - 1e-12);
    JointDiagOptions cold;
    cold.warm_start = false;
    EXPECT_NEAR(joint_diagonalize(set, cold).trace.front(), diagonal_objective(set, Matrix::Identity(5, 5)), 1e-12);
  }
}

TEST(Linalg, JointDiagRejectsBadInput) {
  EXPECT_THROW(joint_diagonalize(std::vector<Matrix>{}), std::invalid_argument);
  EXPECT_THROW(joint_diagonalize(std::vector<Matrix>{Matrix::Identity(2, 2), Matrix::Identity(3, 3)}),
               std::invalid_argument);
}
