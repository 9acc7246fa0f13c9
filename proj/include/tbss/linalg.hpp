#ifndef TBSS_LINALG_HPP
#define TBSS_LINALG_HPP

#include "tbss/tensor.hpp"

#include <span>
#include <vector>

namespace tbss {

/// Raised by sym_inv_sqrt when the smallest eigenvalue falls below the
/// relative floor. `mode` is filled in by callers that whiten per mode.
class RankDeficiencyError : public NumericalError {
 public:
  RankDeficiencyError(double ratio, Index mode = -1);
  double ratio() const { return ratio_; }
  Index mode() const { return mode_; }

 private:
  double ratio_;
  Index mode_;
};

struct SymEigen {
  Vector values;   ///< descending
  Matrix vectors;  ///< orthonormal columns, matching `values`
};

/// Eigendecomposition of a symmetric matrix, eigenvalues in descending order.
/// Throws std::invalid_argument if `s` is not symmetric to 1e-10 relative.
SymEigen sym_eigen(const Matrix& s);

inline constexpr double kRankFloor = 1e-12;

/// Unique symmetric inverse square root of a symmetric positive definite
/// matrix. Throws RankDeficiencyError when lambda_min <= floor * lambda_max.
Matrix sym_inv_sqrt(const Matrix& s, double rank_floor = kRankFloor);

struct JointDiagOptions {
  double tol = 1e-12;  ///< Givens angle below which a pair counts as converged
  int max_sweeps = 100;
  /// Start from the eigenvectors of sum_k M_k^2 instead of the identity. A run
  /// ending below the objective at the identity restarts from the identity.
  bool warm_start = true;
};

struct JointDiagResult {
  /// Orthogonal U; the columns are the joint eigenvectors, so U^T M U is
  /// as diagonal as possible for every M in the set.
  Matrix rotation;
  /// Sum over the set of ||diag(U^T M U)||^2 for the symmetrized matrices.
  double objective = 0.0;
  int sweeps_used = 0;
  bool converged = false;
  /// Objective at the starting rotation and after each sweep.
  std::vector<double> trace;
};

/// Sum of squared diagonal entries of U^T sym(M) U over the set.
double diagonal_objective(std::span<const Matrix> ms, const Matrix& u);

/// Sum of squared off-diagonal entries of U^T sym(M) U over the set.
double off_diagonal_mass(std::span<const Matrix> ms, const Matrix& u);

/// Orthogonal joint approximate diagonalization by cyclic Jacobi sweeps.
///
/// Every matrix is symmetrized as (M + M^T)/2. Each Givens step maximizes the
/// diagonal objective restricted to the (i, j) plane in closed form, so the
/// objective never decreases. The returned columns are ordered by descending
/// diagonal of U^T M_1 U and signed so that each column's largest-magnitude
/// entry is positive.
JointDiagResult joint_diagonalize(std::span<const Matrix> ms, const JointDiagOptions& opts = {});

}  // namespace tbss

#endif  // TBSS_LINALG_HPP
