#ifndef TBSS_TENSOR_HPP
#define TBSS_TENSOR_HPP

#include <Eigen/Dense>

#include <span>
#include <stdexcept>
#include <string>
#include <vector>

/// Dense real tensors, tensor-valued time series and the multilinear
/// primitives (flattening, mode products, mode Gram matrices).
///
/// Layout: a tensor of dimensions (p_1, ..., p_r) stores element
/// (i_1, ..., i_r) at linear position i_1 + p_1 i_2 + p_1 p_2 i_3 + ...,
/// i.e. the first index varies fastest. With this layout
///
///     vec(X x_1 A_1 ... x_r A_r) = (A_r (x) ... (x) A_1) vec(X).
///
/// The m-flattening X^(m) is p_m x rho_m; its column index enumerates the
/// remaining indices with the smallest-numbered mode varying fastest.
///
/// Mode indices are zero-based throughout the C++ API.
namespace tbss {

using Index = Eigen::Index;
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Dims = std::vector<Index>;

/// Raised for failures of the numerical pipeline (rank deficiency,
/// non-finite generator output). The CLI maps it to exit code 2.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Product of all entries of `dims`.
Index dims_size(const Dims& dims);

/// Throws std::invalid_argument unless dims is non-empty with positive entries.
void check_dims(const Dims& dims);

std::string dims_to_string(const Dims& dims);

class Tensor {
 public:
  /// Zero tensor.
  explicit Tensor(Dims dims);
  Tensor(Dims dims, Vector data);

  const Dims& dims() const { return dims_; }
  Index order() const { return static_cast<Index>(dims_.size()); }
  Index size() const { return data_.size(); }
  Index dim(Index mode) const { return dims_.at(static_cast<std::size_t>(mode)); }

  const Vector& data() const { return data_; }
  Vector& data() { return data_; }

  double operator()(std::span<const Index> idx) const { return data_[linear_index(idx)]; }
  double& operator()(std::span<const Index> idx) { return data_[linear_index(idx)]; }

  Index linear_index(std::span<const Index> idx) const;

 private:
  Dims dims_;
  Vector data_;
};

/// A sequence of T equally-shaped tensors. Frames are stored as the columns
/// of a (prod p_m) x T matrix, each column in the tensor linear layout.
class TensorSeries {
 public:
  TensorSeries(Dims dims, Matrix frames);
  TensorSeries(Dims dims, Index length);

  static TensorSeries from_frames(std::span<const Tensor> frames);

  const Dims& dims() const { return dims_; }
  Index order() const { return static_cast<Index>(dims_.size()); }
  Index length() const { return frames_.cols(); }
  Index frame_size() const { return frames_.rows(); }

  Tensor frame(Index t) const;
  void set_frame(Index t, const Tensor& x);

  /// Frame t occupies column t.
  const Matrix& data() const { return frames_; }
  Matrix& data() { return frames_; }

 private:
  Dims dims_;
  Matrix frames_;
};

/// Product of all dimensions except `mode`.
Index mode_rho(const Dims& dims, Index mode);

Matrix m_flatten(const Tensor& x, Index mode);
Tensor m_unflatten(const Matrix& flat, Index mode, const Dims& dims);

/// Applies `a` (q x p_mode) to every mode-`mode` vector of `x`.
Tensor mode_product(const Tensor& x, const Matrix& a, Index mode);
TensorSeries mode_product(const TensorSeries& s, const Matrix& a, Index mode);

/// Chained mode products over all modes, one matrix per mode.
TensorSeries multi_mode_product(const TensorSeries& s, std::span<const Matrix> mats);

/// Sum over all fibers of x-fiber (y-fiber)^T; equals X^(m) (Y^(m))^T.
Matrix mode_gram(const Tensor& x, const Tensor& y, Index mode);

Vector vectorize(const Tensor& x);

/// Concatenation [X_1^(m) | X_2^(m) | ... | X_T^(m)] of the per-frame
/// m-flattenings, a p_m x (rho_m T) matrix.
Matrix flatten_series(const TensorSeries& s, Index mode);

/// Element-wise temporal mean.
Tensor temporal_mean(const TensorSeries& s);

/// Subtracts the element-wise temporal mean from every frame.
TensorSeries center(const TensorSeries& s);

}  // namespace tbss

#endif  // TBSS_TENSOR_HPP
