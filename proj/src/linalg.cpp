#include "tbss/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace tbss {

namespace {

std::string rank_message(double ratio, Index mode) {
  std::ostringstream os;
  os << "covariance is rank deficient";
  if (mode >= 0) os << " in mode " << mode + 1;
  os << ": smallest/largest eigenvalue ratio " << ratio << " is below " << kRankFloor;
  return os.str();
}

Matrix symmetrized(const Matrix& m) { return 0.5 * (m + m.transpose()); }

void check_square_set(std::span<const Matrix> ms) {
  if (ms.empty()) throw std::invalid_argument("joint_diagonalize: empty matrix set");
  const Index p = ms.front().rows();
  for (const Matrix& m : ms) {
    if (m.rows() != m.cols()) throw std::invalid_argument("joint_diagonalize: non-square matrix");
    if (m.rows() != p) throw std::invalid_argument("joint_diagonalize: matrices differ in size");
  }
}

// Rows and columns i, j of every matrix are rotated by G = [c -s; s c],
// i.e. M <- G^T M G in the (i, j) plane.
void rotate_cols(Matrix& m, Index i, Index j, double c, double s) {
  for (Index k = 0; k < m.rows(); ++k) {
    const double a = m(k, i);
    const double b = m(k, j);
    m(k, i) = c * a + s * b;
    m(k, j) = -s * a + c * b;
  }
}

void rotate_pair(std::vector<Matrix>& work, Matrix& v, Index i, Index j, double c, double s) {
  for (Matrix& m : work) {
    for (Index k = 0; k < m.cols(); ++k) {
      const double a = m(i, k);
      const double b = m(j, k);
      m(i, k) = c * a + s * b;
      m(j, k) = -s * a + c * b;
    }
    rotate_cols(m, i, j, c, s);
  }
  rotate_cols(v, i, j, c, s);
}

double diag_sum(const std::vector<Matrix>& work) {
  double total = 0.0;
  for (const Matrix& m : work) total += m.diagonal().squaredNorm();
  return total;
}

}  // namespace

RankDeficiencyError::RankDeficiencyError(double ratio, Index mode)
    : NumericalError(rank_message(ratio, mode)), ratio_(ratio), mode_(mode) {}

SymEigen sym_eigen(const Matrix& s) {
  if (s.rows() != s.cols()) throw std::invalid_argument("sym_eigen: matrix is not square");
  const double scale = std::max(s.cwiseAbs().maxCoeff(), 1.0);
  if ((s - s.transpose()).cwiseAbs().maxCoeff() > 1e-10 * scale) {
    throw std::invalid_argument("sym_eigen: matrix is not symmetric");
  }
  Eigen::SelfAdjointEigenSolver<Matrix> solver(symmetrized(s));
  if (solver.info() != Eigen::Success) throw NumericalError("symmetric eigendecomposition failed");
  // Eigen returns ascending order.
  SymEigen out{solver.eigenvalues().reverse(), solver.eigenvectors().rowwise().reverse()};
  return out;
}

Matrix sym_inv_sqrt(const Matrix& s, double rank_floor) {
  const SymEigen e = sym_eigen(s);
  const double largest = e.values[0];
  const double smallest = e.values[e.values.size() - 1];
  const double ratio = largest > 0.0 ? smallest / largest : 0.0;
  if (!(largest > 0.0) || !(ratio > rank_floor)) throw RankDeficiencyError(ratio);
  const Vector inv_root = e.values.cwiseSqrt().cwiseInverse();
  Matrix r = e.vectors * inv_root.asDiagonal() * e.vectors.transpose();
  return symmetrized(r);
}

double diagonal_objective(std::span<const Matrix> ms, const Matrix& u) {
  double total = 0.0;
  for (const Matrix& m : ms) total += (u.transpose() * symmetrized(m) * u).diagonal().squaredNorm();
  return total;
}

double off_diagonal_mass(std::span<const Matrix> ms, const Matrix& u) {
  double total = 0.0;
  for (const Matrix& m : ms) {
    const Matrix d = u.transpose() * symmetrized(m) * u;
    total += d.squaredNorm() - d.diagonal().squaredNorm();
  }
  return total;
}

namespace {

// Cyclic Jacobi sweeps from rotation v; work holds v^T sym(M) v.
JointDiagResult jacobi_sweeps(const std::vector<Matrix>& sym, Matrix v, const JointDiagOptions& opts,
                              std::vector<Matrix>& work) {
  const Index p = v.rows();
  work.clear();
  for (const Matrix& m : sym) work.push_back(v.transpose() * m * v);

  JointDiagResult res;
  res.trace.push_back(diag_sum(work));
  for (int sweep = 0; sweep < opts.max_sweeps && !res.converged; ++sweep) {
    bool rotated = false;
    for (Index i = 0; i + 1 < p; ++i) {
      for (Index j = i + 1; j < p; ++j) {
        // 2x2 sub-problem: maximize sum_k (h_k . (cos 2t, sin 2t))^2 with
        // h_k = (M_ii - M_jj, 2 M_ij); the optimum is the leading
        // eigenvector of sum_k h_k h_k^T.
        double gdd = 0.0;
        double goo = 0.0;
        double gdo = 0.0;
        for (const Matrix& m : work) {
          const double d = m(i, i) - m(j, j);
          const double o = 2.0 * m(i, j);
          gdd += d * d;
          goo += o * o;
          gdo += d * o;
        }
        const double ton = gdd - goo;
        const double toff = 2.0 * gdo;
        const double theta = 0.5 * std::atan2(toff, ton + std::hypot(ton, toff));
        if (std::abs(theta) > opts.tol) {
          rotated = true;
          rotate_pair(work, v, i, j, std::cos(theta), std::sin(theta));
        }
      }
    }
    res.sweeps_used = sweep + 1;
    res.trace.push_back(diag_sum(work));
    if (!rotated) res.converged = true;
  }
  if (p == 1) res.converged = true;
  res.rotation = std::move(v);
  return res;
}

}  // namespace

JointDiagResult joint_diagonalize(std::span<const Matrix> ms, const JointDiagOptions& opts) {
  check_square_set(ms);
  const Index p = ms.front().rows();

  std::vector<Matrix> sym;
  sym.reserve(ms.size());
  for (const Matrix& m : ms) sym.push_back(symmetrized(m));

  std::vector<Matrix> work;
  JointDiagResult res;
  const double at_identity = diag_sum(sym);
  if (opts.warm_start) {
    // Eigenvectors of sum_k M_k^2 rotate with the data.
    Matrix gram = Matrix::Zero(p, p);
    for (const Matrix& m : sym) gram.noalias() += m * m;
    res = jacobi_sweeps(sym, sym_eigen(gram).vectors, opts, work);
  }
  if (!opts.warm_start || res.trace.back() < at_identity) res = jacobi_sweeps(sym, Matrix::Identity(p, p), opts, work);
  const Matrix v = res.rotation;

  // Column order by descending diag(U^T M_1 U), then sign normalization.
  std::vector<Index> order(static_cast<std::size_t>(p));
  std::iota(order.begin(), order.end(), Index{0});
  const Vector lead = work.front().diagonal();
  std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) { return lead[a] > lead[b]; });
  Matrix u(p, p);
  for (Index k = 0; k < p; ++k) {
    Vector col = v.col(order[static_cast<std::size_t>(k)]);
    Index arg = 0;
    col.cwiseAbs().maxCoeff(&arg);
    if (col[arg] < 0.0) col = -col;
    u.col(k) = col;
  }
  res.rotation = std::move(u);
  res.objective = res.trace.back();
  return res;
}

}  // namespace tbss
