#ifndef TBSS_MOMENTS_HPP
#define TBSS_MOMENTS_HPP

#include "tbss/tensor.hpp"

#include <array>
#include <string>
#include <vector>

// Lagged moment functionals estimated from finite samples.
//
// A vector series is a p x T matrix whose column t is x_t. Every expectation
// E[f(t)] over lags tau_1..tau_k is the plain average of f(t) over the
// T - max(tau) admissible time points t = 0, ..., T - max(tau) - 1. Inputs are
// assumed centered; nothing here re-centers.
//
// Mode functionals work on the m-flattenings X_t^(m) and carry the extra
// 1/rho_m factor. Row/column indices i, j and modes are zero-based.
namespace tbss {

using VectorSeries = Matrix;

/// Sorted set of distinct non-negative lags.
class LagSet {
 public:
  LagSet() = default;
  explicit LagSet(std::vector<int> lags);

  /// All lags first..last inclusive.
  static LagSet range(int first, int last);
  /// Accepts "a:b" (inclusive range) or "a,b,c".
  static LagSet parse(const std::string& text);

  const std::vector<int>& lags() const { return lags_; }
  int max() const { return lags_.back(); }
  std::size_t size() const { return lags_.size(); }
  bool contains(int lag) const;
  auto begin() const { return lags_.begin(); }
  auto end() const { return lags_.end(); }

  /// Compact form: "a:b" for contiguous sets, otherwise "a,b,c".
  std::string to_string() const;

  friend bool operator==(const LagSet&, const LagSet&) = default;

 private:
  std::vector<int> lags_;
};

enum class MomentKind {
  sigma_tau,
  b_tau,
  b_tau_ij,
  c_tau_ij,
  mode_sigma_tau,
  mode_b_tau,
  mode_b_lags,
  mode_c_tau_ij,
};

struct MomentMatrix {
  Matrix entries;
  MomentKind kind;
  std::array<int, 4> lags{};  ///< tau in lags[0]; all four for mode_b_lags
  int i = -1;
  int j = -1;
  Index mode = -1;
};

// Vector family.

/// E[x_t x_{t+tau}^T], optionally symmetrized to (M + M^T)/2.
MomentMatrix sigma_tau(const VectorSeries& s, int tau, bool symmetrize);

/// E[x_t x_{t+tau}^T x_{t+tau} x_t^T].
MomentMatrix b_tau(const VectorSeries& s, int tau);

/// E[(x_{t+tau})_i (x_{t+tau})_j x_t x_t^T].
MomentMatrix b_tau_ij(const VectorSeries& s, int tau, int i, int j);

/// B_tau_ij - S (E^ij + E^ji) S^T - delta_ij I, S = Sigma_tau (unsymmetrized).
MomentMatrix c_tau_ij(const VectorSeries& s, int tau, int i, int j);

/// All B_tau_ij at once; entry i + p j holds B_tau_ij.
std::vector<Matrix> b_tau_ij_all(const VectorSeries& s, int tau);

/// All C_tau_ij at once; entry i + p j holds C_tau_ij.
std::vector<Matrix> c_tau_ij_all(const VectorSeries& s, int tau);

// Mode family.

/// (1/rho_m) E[X_t^(m) X_t^(m)T].
MomentMatrix mode_cov(const TensorSeries& s, Index mode);

/// (1/rho_m) E[X_t^(m) X_{t+tau}^(m)T], symmetrized by default.
MomentMatrix mode_autocov(const TensorSeries& s, Index mode, int tau, bool symmetrize = true);

/// (1/rho_m) E[X_t^(m) X_{t+tau}^(m)T X_{t+tau}^(m) X_t^(m)T].
MomentMatrix mode_b_tau(const TensorSeries& s, Index mode, int tau);

/// (1/rho_m) E[(X_{t+l0} X_{t+l1}^T)_ij X_{t+l2} X_{t+l3}^T] on m-flattenings.
MomentMatrix mode_b_lags(const TensorSeries& s, Index mode, const std::array<int, 4>& lags, int i, int j);

/// B_{0 tau tau 0 ij} + B_{0 tau 0 tau ij} - B_{tau tau 0 0 ij}
///   - S_0 (E^ij + E^ji + tr(E^ij) I) S_0^T, with S_0 the mode covariance.
MomentMatrix mode_c_tau_ij(const TensorSeries& s, Index mode, int tau, int i, int j);

/// All mode_b_lags matrices for one lag quadruple; entry i + p_m j.
std::vector<Matrix> mode_b_lags_all(const TensorSeries& s, Index mode, const std::array<int, 4>& lags);

/// All mode_c_tau_ij matrices for one lag; entry i + p_m j.
std::vector<Matrix> mode_c_tau_ij_all(const TensorSeries& s, Index mode, int tau);

}  // namespace tbss

#endif  // TBSS_MOMENTS_HPP
