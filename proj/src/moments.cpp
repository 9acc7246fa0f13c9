#include "tbss/moments.hpp"

#include <algorithm>
#include <charconv>
#include <sstream>

namespace tbss {

namespace {

// Number of admissible time points for a largest lag `max_lag`.
Index summands(Index length, int max_lag) {
  if (max_lag < 0) throw std::out_of_range("lags must be non-negative");
  if (max_lag >= length) {
    throw std::out_of_range("lag " + std::to_string(max_lag) + " must be smaller than the series length " +
                            std::to_string(length));
  }
  return length - max_lag;
}

void check_index(int i, Index p, const char* name) {
  if (i < 0 || i >= p) {
    throw std::out_of_range(std::string("index ") + name + "=" + std::to_string(i) + " out of range for dimension " +
                            std::to_string(p));
  }
}

int parse_int(const std::string& text) {
  int value = 0;
  const char* first = text.data();
  const char* last = first + text.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last) throw std::invalid_argument("invalid lag '" + text + "'");
  return value;
}

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t");
  if (a == std::string::npos) return {};
  const auto b = s.find_last_not_of(" \t");
  return s.substr(a, b - a + 1);
}

// Columns t = 0..n-1 hold vec(x_{t+a} x_{t+b}^T).
Matrix vector_outer_products(const VectorSeries& s, int a, int b, Index n) {
  const Index p = s.rows();
  Matrix out(p * p, n);
  for (Index t = 0; t < n; ++t) {
    Eigen::Map<Matrix>(out.col(t).data(), p, p).noalias() = s.col(t + a) * s.col(t + b).transpose();
  }
  return out;
}

// Per-frame m-flattenings of a series, laid out side by side.
struct Flattened {
  Matrix f;
  Index p;
  Index rho;
  Index length;

  Flattened(const TensorSeries& s, Index mode)
      : f(flatten_series(s, mode)), p(s.dims()[static_cast<std::size_t>(mode)]), rho(mode_rho(s.dims(), mode)), length(s.length()) {}

  auto frame(Index t) const { return f.middleCols(t * rho, rho); }
};

// Columns t = 0..n-1 hold vec(X_{t+a} X_{t+b}^T).
Matrix mode_outer_products(const Flattened& x, int a, int b, Index n) {
  Matrix out(x.p * x.p, n);
  for (Index t = 0; t < n; ++t) {
    Eigen::Map<Matrix>(out.col(t).data(), x.p, x.p).noalias() = x.frame(t + a) * x.frame(t + b).transpose();
  }
  return out;
}

// Column r of `packed` is vec of the r-th p x p matrix.
std::vector<Matrix> unpack(const Matrix& packed, Index p) {
  std::vector<Matrix> out;
  out.reserve(static_cast<std::size_t>(packed.cols()));
  for (Index r = 0; r < packed.cols(); ++r) out.emplace_back(Eigen::Map<const Matrix>(packed.col(r).data(), p, p));
  return out;
}

Matrix mode_cov_matrix(const Flattened& x) {
  return x.f * x.f.transpose() / static_cast<double>(x.rho * x.length);
}

MomentMatrix make(Matrix entries, MomentKind kind, std::array<int, 4> lags = {}, int i = -1, int j = -1,
                  Index mode = -1) {
  return MomentMatrix{std::move(entries), kind, lags, i, j, mode};
}

}  // namespace

LagSet::LagSet(std::vector<int> lags) : lags_(std::move(lags)) {
  if (lags_.empty()) throw std::invalid_argument("lag set must not be empty");
  std::sort(lags_.begin(), lags_.end());
  lags_.erase(std::unique(lags_.begin(), lags_.end()), lags_.end());
  if (lags_.front() < 0) throw std::invalid_argument("lags must be non-negative");
}

LagSet LagSet::range(int first, int last) {
  if (last < first) throw std::invalid_argument("empty lag range");
  std::vector<int> lags;
  for (int l = first; l <= last; ++l) lags.push_back(l);
  return LagSet(std::move(lags));
}

LagSet LagSet::parse(const std::string& text) {
  const std::string t = trim(text);
  if (const auto colon = t.find(':'); colon != std::string::npos) {
    return range(parse_int(trim(t.substr(0, colon))), parse_int(trim(t.substr(colon + 1))));
  }
  std::vector<int> lags;
  std::stringstream ss(t);
  std::string item;
  while (std::getline(ss, item, ',')) lags.push_back(parse_int(trim(item)));
  return LagSet(std::move(lags));
}

bool LagSet::contains(int lag) const { return std::binary_search(lags_.begin(), lags_.end(), lag); }

std::string LagSet::to_string() const {
  std::ostringstream os;
  if (lags_.size() > 1 && lags_.back() - lags_.front() + 1 == static_cast<int>(lags_.size())) {
    os << lags_.front() << ':' << lags_.back();
  } else {
    for (std::size_t k = 0; k < lags_.size(); ++k) os << (k ? "," : "") << lags_[k];
  }
  return os.str();
}

MomentMatrix sigma_tau(const VectorSeries& s, int tau, bool symmetrize) {
  const Index n = summands(s.cols(), tau);
  Matrix m = s.leftCols(n) * s.middleCols(tau, n).transpose() / static_cast<double>(n);
  if (symmetrize) m = (0.5 * (m + m.transpose())).eval();
  return make(std::move(m), MomentKind::sigma_tau, {tau});
}

MomentMatrix b_tau(const VectorSeries& s, int tau) {
  const Index n = summands(s.cols(), tau);
  const Vector w = s.middleCols(tau, n).colwise().squaredNorm().transpose();
  Matrix m = s.leftCols(n) * w.asDiagonal() * s.leftCols(n).transpose() / static_cast<double>(n);
  return make(std::move(m), MomentKind::b_tau, {tau});
}

MomentMatrix b_tau_ij(const VectorSeries& s, int tau, int i, int j) {
  const Index n = summands(s.cols(), tau);
  check_index(i, s.rows(), "i");
  check_index(j, s.rows(), "j");
  const Vector w = s.row(i).segment(tau, n).cwiseProduct(s.row(j).segment(tau, n)).transpose();
  Matrix m = s.leftCols(n) * w.asDiagonal() * s.leftCols(n).transpose() / static_cast<double>(n);
  return make(std::move(m), MomentKind::b_tau_ij, {tau}, i, j);
}

MomentMatrix c_tau_ij(const VectorSeries& s, int tau, int i, int j) {
  const Index p = s.rows();
  Matrix m = b_tau_ij(s, tau, i, j).entries;
  const Matrix sig = sigma_tau(s, tau, false).entries;
  m -= sig.col(i) * sig.col(j).transpose() + sig.col(j) * sig.col(i).transpose();
  if (i == j) m -= Matrix::Identity(p, p);
  return make(std::move(m), MomentKind::c_tau_ij, {tau}, i, j);
}

std::vector<Matrix> b_tau_ij_all(const VectorSeries& s, int tau) {
  const Index n = summands(s.cols(), tau);
  const Matrix lagged = vector_outer_products(s, tau, tau, n);
  const Matrix current = vector_outer_products(s, 0, 0, n);
  return unpack(current * lagged.transpose() / static_cast<double>(n), s.rows());
}

std::vector<Matrix> c_tau_ij_all(const VectorSeries& s, int tau) {
  const Index p = s.rows();
  std::vector<Matrix> out = b_tau_ij_all(s, tau);
  const Matrix sig = sigma_tau(s, tau, false).entries;
  for (Index j = 0; j < p; ++j) {
    for (Index i = 0; i < p; ++i) {
      Matrix& m = out[static_cast<std::size_t>(i + p * j)];
      m -= sig.col(i) * sig.col(j).transpose() + sig.col(j) * sig.col(i).transpose();
      if (i == j) m.diagonal().array() -= 1.0;
    }
  }
  return out;
}

MomentMatrix mode_cov(const TensorSeries& s, Index mode) {
  const Flattened x(s, mode);
  return make(mode_cov_matrix(x), MomentKind::mode_sigma_tau, {0}, -1, -1, mode);
}

MomentMatrix mode_autocov(const TensorSeries& s, Index mode, int tau, bool symmetrize) {
  const Index n = summands(s.length(), tau);
  const Flattened x(s, mode);
  Matrix m = x.f.leftCols(n * x.rho) * x.f.middleCols(tau * x.rho, n * x.rho).transpose() /
             static_cast<double>(x.rho * n);
  if (symmetrize) m = (0.5 * (m + m.transpose())).eval();
  return make(std::move(m), MomentKind::mode_sigma_tau, {tau}, -1, -1, mode);
}

MomentMatrix mode_b_tau(const TensorSeries& s, Index mode, int tau) {
  const Index n = summands(s.length(), tau);
  const Flattened x(s, mode);
  Matrix acc = Matrix::Zero(x.p, x.p);
  Matrix a(x.p, x.p);
  for (Index t = 0; t < n; ++t) {
    a.noalias() = x.frame(t) * x.frame(t + tau).transpose();
    acc.noalias() += a * a.transpose();
  }
  acc /= static_cast<double>(x.rho * n);
  return make(std::move(acc), MomentKind::mode_b_tau, {tau}, -1, -1, mode);
}

MomentMatrix mode_b_lags(const TensorSeries& s, Index mode, const std::array<int, 4>& lags, int i, int j) {
  const Index n = summands(s.length(), *std::max_element(lags.begin(), lags.end()));
  const Flattened x(s, mode);
  check_index(i, x.p, "i");
  check_index(j, x.p, "j");
  Matrix acc = Matrix::Zero(x.p, x.p);
  for (Index t = 0; t < n; ++t) {
    const double w = x.frame(t + lags[0]).row(i).dot(x.frame(t + lags[1]).row(j));
    acc.noalias() += w * (x.frame(t + lags[2]) * x.frame(t + lags[3]).transpose());
  }
  acc /= static_cast<double>(x.rho * n);
  return make(std::move(acc), MomentKind::mode_b_lags, lags, i, j, mode);
}

MomentMatrix mode_c_tau_ij(const TensorSeries& s, Index mode, int tau, int i, int j) {
  Matrix m = mode_b_lags(s, mode, {0, tau, tau, 0}, i, j).entries +
             mode_b_lags(s, mode, {0, tau, 0, tau}, i, j).entries -
             mode_b_lags(s, mode, {tau, tau, 0, 0}, i, j).entries;
  const Matrix sig = mode_cov(s, mode).entries;
  m -= sig.col(i) * sig.col(j).transpose() + sig.col(j) * sig.col(i).transpose();
  if (i == j) m -= sig * sig.transpose();
  return make(std::move(m), MomentKind::mode_c_tau_ij, {tau}, i, j, mode);
}

std::vector<Matrix> mode_b_lags_all(const TensorSeries& s, Index mode, const std::array<int, 4>& lags) {
  const Index n = summands(s.length(), *std::max_element(lags.begin(), lags.end()));
  const Flattened x(s, mode);
  const Matrix weights = mode_outer_products(x, lags[0], lags[1], n);
  const Matrix grams = mode_outer_products(x, lags[2], lags[3], n);
  return unpack(grams * weights.transpose() / static_cast<double>(x.rho * n), x.p);
}

std::vector<Matrix> mode_c_tau_ij_all(const TensorSeries& s, Index mode, int tau) {
  const Index n = summands(s.length(), tau);
  const Flattened x(s, mode);
  const Index p = x.p;
  const Matrix cross = mode_outer_products(x, 0, tau, n);         // X_t X_{t+tau}^T
  const Matrix cross_t = mode_outer_products(x, tau, 0, n);       // X_{t+tau} X_t^T
  const Matrix lagged_gram = mode_outer_products(x, tau, tau, n);  // X_{t+tau} X_{t+tau}^T
  const Matrix gram = mode_outer_products(x, 0, 0, n);             // X_t X_t^T

  // B_{0 tau tau 0} + B_{0 tau 0 tau} - B_{tau tau 0 0}, packed by (i, j).
  const Matrix packed = ((cross_t + cross) * cross.transpose() - gram * lagged_gram.transpose()) /
                        static_cast<double>(x.rho * n);
  std::vector<Matrix> out = unpack(packed, p);

  const Matrix sig = mode_cov_matrix(x);
  const Matrix sig_sq = sig * sig.transpose();
  for (Index j = 0; j < p; ++j) {
    for (Index i = 0; i < p; ++i) {
      Matrix& c = out[static_cast<std::size_t>(i + p * j)];
      c -= sig.col(i) * sig.col(j).transpose() + sig.col(j) * sig.col(i).transpose();
      if (i == j) c -= sig_sq;
    }
  }
  return out;
}

}  // namespace tbss
