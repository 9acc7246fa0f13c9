#include "tbss/eval.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace tbss {

namespace {

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Index i = 0; i < a.rows(); ++i) {
    for (Index j = 0; j < a.cols(); ++j) out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  }
  return out;
}

}  // namespace

Matrix kron_unmixing(std::span<const Matrix> mode_unmixers) {
  if (mode_unmixers.empty()) throw std::invalid_argument("kron_unmixing: no matrices");
  Matrix out = mode_unmixers.front();
  for (std::size_t m = 1; m < mode_unmixers.size(); ++m) out = kron(mode_unmixers[m], out);
  return out;
}

// Shortest augmenting path with row/column potentials, O(n^3).
std::vector<Index> solve_assignment(const Matrix& cost) {
  const Index n = cost.rows();
  if (cost.cols() != n) throw std::invalid_argument("solve_assignment: cost matrix must be square");
  constexpr double inf = std::numeric_limits<double>::infinity();
  // One-based internals; column 0 is the virtual start.
  std::vector<double> u(static_cast<std::size_t>(n + 1), 0.0);
  std::vector<double> v(static_cast<std::size_t>(n + 1), 0.0);
  std::vector<Index> match(static_cast<std::size_t>(n + 1), 0);  // match[col] = row
  std::vector<Index> way(static_cast<std::size_t>(n + 1), 0);

  for (Index row = 1; row <= n; ++row) {
    match[0] = row;
    Index col0 = 0;
    std::vector<double> minv(static_cast<std::size_t>(n + 1), inf);
    std::vector<char> used(static_cast<std::size_t>(n + 1), 0);
    do {
      used[static_cast<std::size_t>(col0)] = 1;
      const Index row0 = match[static_cast<std::size_t>(col0)];
      double delta = inf;
      Index col1 = 0;
      for (Index col = 1; col <= n; ++col) {
        const auto c = static_cast<std::size_t>(col);
        if (used[c]) continue;
        const double reduced = cost(row0 - 1, col - 1) - u[static_cast<std::size_t>(row0)] - v[c];
        if (reduced < minv[c]) {
          minv[c] = reduced;
          way[c] = col0;
        }
        if (minv[c] < delta) {
          delta = minv[c];
          col1 = col;
        }
      }
      for (Index col = 0; col <= n; ++col) {
        const auto c = static_cast<std::size_t>(col);
        if (used[c]) {
          u[static_cast<std::size_t>(match[c])] += delta;
          v[c] -= delta;
        } else {
          minv[c] -= delta;
        }
      }
      col0 = col1;
    } while (match[static_cast<std::size_t>(col0)] != 0);
    do {
      const Index col1 = way[static_cast<std::size_t>(col0)];
      match[static_cast<std::size_t>(col0)] = match[static_cast<std::size_t>(col1)];
      col0 = col1;
    } while (col0 != 0);
  }

  std::vector<Index> assignment(static_cast<std::size_t>(n), -1);
  for (Index col = 1; col <= n; ++col) {
    assignment[static_cast<std::size_t>(match[static_cast<std::size_t>(col)] - 1)] = col - 1;
  }
  return assignment;
}

MdiValue mdi(const Matrix& gamma, const Matrix& omega) {
  if (gamma.cols() != omega.rows()) throw std::invalid_argument("mdi: gamma and omega are not conformable");
  const Matrix g = gamma * omega;
  const Index p = g.rows();
  if (g.cols() != p) throw std::invalid_argument("mdi: gamma * omega must be square");
  if (p < 2) throw std::invalid_argument("mdi: dimension must be at least 2");

  const Vector norms = g.rowwise().squaredNorm();
  for (Index k = 0; k < p; ++k) {
    if (!(norms[k] > 0.0)) throw std::invalid_argument("mdi: gamma * omega has a zero row");
  }
  // score(k, i): share of row k's energy on column i, i.e. how well row k
  // can be scaled onto e_i.
  const Matrix score = g.array().square().colwise() / norms.array();

  // Row k of G goes to target row i; maximize the total score.
  const std::vector<Index> row_to_target = solve_assignment(-score);

  MdiValue out;
  out.assignment.assign(static_cast<std::size_t>(p), -1);
  out.row_scores.resize(p);
  // p - S* accumulated from the off-assignment energy of each row, which
  // keeps near-perfect unmixers at rounding level instead of sqrt(eps).
  double residual = 0.0;
  for (Index k = 0; k < p; ++k) {
    const Index i = row_to_target[static_cast<std::size_t>(k)];
    out.assignment[static_cast<std::size_t>(i)] = k;
    out.row_scores[i] = score(k, i);
    double off = 0.0;
    for (Index j = 0; j < p; ++j) {
      if (j != i) off += g(k, j) * g(k, j);
    }
    residual += off / norms[k];
  }
  const double sq = residual / static_cast<double>(p - 1);
  out.value = std::sqrt(std::clamp(sq, 0.0, 1.0));
  return out;
}

std::vector<CorrelationMatch> max_abs_correlations(const Matrix& components, const Matrix& targets,
                                                   std::vector<Index>* skipped) {
  if (components.cols() != targets.cols()) {
    throw std::invalid_argument("max_abs_correlations: components and targets differ in length");
  }
  auto centered_unit = [](const Matrix& rows) {
    Matrix c = rows.colwise() - rows.rowwise().mean();
    Vector norms = c.rowwise().norm();
    return std::pair{c, norms};
  };
  const auto [comp, comp_norm] = centered_unit(components);
  const auto [targ, targ_norm] = centered_unit(targets);

  std::vector<Index> live;
  for (Index k = 0; k < comp.rows(); ++k) {
    if (comp_norm[k] > 0.0) {
      live.push_back(k);
    } else if (skipped) {
      skipped->push_back(k);
    }
  }

  std::vector<CorrelationMatch> out;
  for (Index i = 0; i < targ.rows(); ++i) {
    CorrelationMatch best;
    if (targ_norm[i] > 0.0) {
      for (Index k : live) {
        const double r = std::abs(comp.row(k).dot(targ.row(i))) / (comp_norm[k] * targ_norm[i]);
        if (r > best.max_abs_corr || best.component < 0) best = {r, k};
      }
    }
    out.push_back(best);
  }
  return out;
}

std::vector<CorrelationMatch> max_abs_correlations(const TensorSeries& recovered, const Matrix& targets,
                                                   std::vector<Index>* skipped) {
  return max_abs_correlations(recovered.data(), targets, skipped);
}

double excess_kurtosis(const Vector& x) {
  const Vector c = x.array() - x.mean();
  const double n = static_cast<double>(x.size());
  const double m2 = c.squaredNorm() / n;
  const double m4 = c.array().square().square().sum() / n;
  return m4 / (m2 * m2) - 3.0;
}

KurtosisRanking kurtosis_rank(const TensorSeries& recovered) {
  if (recovered.length() < 4) throw std::invalid_argument("kurtosis_rank needs at least 4 time points");
  KurtosisRanking out;
  const Dims& dims = recovered.dims();
  for (Index k = 0; k < recovered.frame_size(); ++k) {
    const Vector x = recovered.data().row(k).transpose();
    if (!((x.array() - x.mean()).square().sum() > 0.0)) {
      out.excluded.push_back(k);
      continue;
    }
    Dims cell(dims.size());
    Index rest = k;
    for (std::size_t m = 0; m < dims.size(); ++m) {
      cell[m] = rest % dims[m];
      rest /= dims[m];
    }
    out.ranked.push_back({k, std::move(cell), excess_kurtosis(x)});
  }
  std::stable_sort(out.ranked.begin(), out.ranked.end(),
                   [](const KurtosisEntry& a, const KurtosisEntry& b) { return a.excess_kurtosis > b.excess_kurtosis; });
  return out;
}

}  // namespace tbss
