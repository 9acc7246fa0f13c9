#ifndef TBSS_EVAL_HPP
#define TBSS_EVAL_HPP

#include "tbss/tensor.hpp"

#include <span>
#include <vector>

namespace tbss {

/// Gamma^r (x) ... (x) Gamma^1, the unmixer acting on vectorized frames.
Matrix kron_unmixing(std::span<const Matrix> mode_unmixers);

/// Minimum-cost perfect matching. Returns assignment[row] = column.
std::vector<Index> solve_assignment(const Matrix& cost);

struct MdiValue {
  double value = 0.0;
  /// assignment[i] = row of G = Gamma * Omega mapped to target row i.
  std::vector<Index> assignment;
  /// g_{assignment[i], i}^2 / ||g_{assignment[i]}||^2.
  Vector row_scores;
};

/// Minimum distance index
///     MDI = inf_{C = PJD} ||C Gamma Omega - I|| / sqrt(p - 1),
/// solved exactly as a linear assignment over squared row-normalized entries
/// of Gamma * Omega. Throws std::invalid_argument for p < 2, shape mismatch
/// or a zero row.
MdiValue mdi(const Matrix& gamma, const Matrix& omega);

struct CorrelationMatch {
  double max_abs_corr = 0.0;
  Index component = -1;
};

/// For each target (row of `targets`), the largest absolute Pearson
/// correlation with any component (row of `components`). Components with zero
/// variance are skipped and listed in `skipped` when given.
std::vector<CorrelationMatch> max_abs_correlations(const Matrix& components, const Matrix& targets,
                                                   std::vector<Index>* skipped = nullptr);
std::vector<CorrelationMatch> max_abs_correlations(const TensorSeries& recovered, const Matrix& targets,
                                                   std::vector<Index>* skipped = nullptr);

/// m4 / m2^2 - 3 with central moments using divisor n.
double excess_kurtosis(const Vector& x);

struct KurtosisEntry {
  Index component = 0;  ///< linear cell index
  Dims cell;            ///< zero-based multi-index of the cell
  double excess_kurtosis = 0.0;
};

struct KurtosisRanking {
  std::vector<KurtosisEntry> ranked;  ///< descending kurtosis
  std::vector<Index> excluded;        ///< zero-variance cells
};

KurtosisRanking kurtosis_rank(const TensorSeries& recovered);

}  // namespace tbss

#endif  // TBSS_EVAL_HPP
