#include "tbss/tensor.hpp"

#include <functional>
#include <numeric>
#include <sstream>

namespace tbss {

namespace {

// The linear layout seen from one mode: `stride` elements of the faster
// modes, then the mode itself, then `outer` blocks of the slower modes.
struct ModeLayout {
  Index stride;
  Index extent;
  Index outer;
};

ModeLayout mode_layout(const Dims& dims, Index mode) {
  if (mode < 0 || mode >= static_cast<Index>(dims.size())) {
    throw std::out_of_range("mode " + std::to_string(mode) + " out of range for order " +
                            std::to_string(dims.size()));
  }
  ModeLayout l{1, dims[static_cast<std::size_t>(mode)], 1};
  for (Index i = 0; i < mode; ++i) l.stride *= dims[static_cast<std::size_t>(i)];
  for (Index i = mode + 1; i < static_cast<Index>(dims.size()); ++i) l.outer *= dims[static_cast<std::size_t>(i)];
  return l;
}

using ConstBlock = Eigen::Map<const Matrix>;
using Block = Eigen::Map<Matrix>;

// out = data x_mode a over `l.outer` consecutive blocks.
void apply_mode(const double* in, double* out, const ModeLayout& l, const Matrix& a) {
  const Index q = a.rows();
  if (l.stride == 1) {
    Block(out, q, l.outer).noalias() = a * ConstBlock(in, l.extent, l.outer);
    return;
  }
  const Matrix at = a.transpose();
  for (Index o = 0; o < l.outer; ++o) {
    Block(out + o * l.stride * q, l.stride, q).noalias() =
        ConstBlock(in + o * l.stride * l.extent, l.stride, l.extent) * at;
  }
}

Matrix flatten_raw(const double* in, const ModeLayout& l) {
  if (l.stride == 1) return ConstBlock(in, l.extent, l.outer);
  Matrix flat(l.extent, l.stride * l.outer);
  for (Index o = 0; o < l.outer; ++o) {
    flat.middleCols(o * l.stride, l.stride) =
        ConstBlock(in + o * l.stride * l.extent, l.stride, l.extent).transpose();
  }
  return flat;
}

Dims replace_dim(Dims dims, Index mode, Index value) {
  dims[static_cast<std::size_t>(mode)] = value;
  return dims;
}

}  // namespace

Index dims_size(const Dims& dims) {
  return std::accumulate(dims.begin(), dims.end(), Index{1}, std::multiplies<>());
}

void check_dims(const Dims& dims) {
  if (dims.empty()) throw std::invalid_argument("tensor order must be at least 1");
  for (Index d : dims) {
    if (d < 1) throw std::invalid_argument("tensor dimensions must be positive, got " + dims_to_string(dims));
  }
}

std::string dims_to_string(const Dims& dims) {
  std::ostringstream os;
  for (std::size_t i = 0; i < dims.size(); ++i) os << (i ? "," : "") << dims[i];
  return os.str();
}

Tensor::Tensor(Dims dims) : dims_(std::move(dims)) {
  check_dims(dims_);
  data_ = Vector::Zero(dims_size(dims_));
}

Tensor::Tensor(Dims dims, Vector data) : dims_(std::move(dims)), data_(std::move(data)) {
  check_dims(dims_);
  if (data_.size() != dims_size(dims_)) {
    throw std::invalid_argument("tensor data length " + std::to_string(data_.size()) +
                                " does not match dims " + dims_to_string(dims_));
  }
}

Index Tensor::linear_index(std::span<const Index> idx) const {
  if (static_cast<Index>(idx.size()) != order()) throw std::invalid_argument("index arity mismatch");
  Index pos = 0;
  Index stride = 1;
  for (std::size_t m = 0; m < idx.size(); ++m) {
    if (idx[m] < 0 || idx[m] >= dims_[m]) throw std::out_of_range("tensor index out of range");
    pos += idx[m] * stride;
    stride *= dims_[m];
  }
  return pos;
}

TensorSeries::TensorSeries(Dims dims, Matrix frames) : dims_(std::move(dims)), frames_(std::move(frames)) {
  check_dims(dims_);
  if (frames_.rows() != dims_size(dims_)) {
    throw std::invalid_argument("frame size " + std::to_string(frames_.rows()) + " does not match dims " +
                                dims_to_string(dims_));
  }
  if (frames_.cols() < 1) throw std::invalid_argument("a tensor series needs at least one frame");
}

TensorSeries::TensorSeries(Dims dims, Index length)
    : TensorSeries(dims, Matrix::Zero(dims_size(dims), length)) {}

TensorSeries TensorSeries::from_frames(std::span<const Tensor> frames) {
  if (frames.empty()) throw std::invalid_argument("a tensor series needs at least one frame");
  Matrix data(frames.front().size(), static_cast<Index>(frames.size()));
  for (std::size_t t = 0; t < frames.size(); ++t) {
    if (frames[t].dims() != frames.front().dims()) throw std::invalid_argument("frames differ in shape");
    data.col(static_cast<Index>(t)) = frames[t].data();
  }
  return TensorSeries(frames.front().dims(), std::move(data));
}

Tensor TensorSeries::frame(Index t) const { return Tensor(dims_, frames_.col(t)); }

void TensorSeries::set_frame(Index t, const Tensor& x) {
  if (x.dims() != dims_) throw std::invalid_argument("frame shape mismatch");
  frames_.col(t) = x.data();
}

Index mode_rho(const Dims& dims, Index mode) {
  const ModeLayout l = mode_layout(dims, mode);
  return l.stride * l.outer;
}

Matrix m_flatten(const Tensor& x, Index mode) {
  return flatten_raw(x.data().data(), mode_layout(x.dims(), mode));
}

Tensor m_unflatten(const Matrix& flat, Index mode, const Dims& dims) {
  check_dims(dims);
  const ModeLayout l = mode_layout(dims, mode);
  if (flat.rows() != l.extent || flat.cols() != l.stride * l.outer) {
    throw std::invalid_argument("flattening of shape " + std::to_string(flat.rows()) + "x" +
                                std::to_string(flat.cols()) + " does not fit dims " + dims_to_string(dims) +
                                " at mode " + std::to_string(mode));
  }
  Tensor x(dims);
  double* out = x.data().data();
  for (Index o = 0; o < l.outer; ++o) {
    Block(out + o * l.stride * l.extent, l.stride, l.extent) = flat.middleCols(o * l.stride, l.stride).transpose();
  }
  return x;
}

Tensor mode_product(const Tensor& x, const Matrix& a, Index mode) {
  const ModeLayout l = mode_layout(x.dims(), mode);
  if (a.cols() != l.extent) {
    throw std::invalid_argument("mode product: matrix has " + std::to_string(a.cols()) + " columns, mode " +
                                std::to_string(mode) + " has extent " + std::to_string(l.extent));
  }
  Tensor out(replace_dim(x.dims(), mode, a.rows()));
  apply_mode(x.data().data(), out.data().data(), l, a);
  return out;
}

TensorSeries mode_product(const TensorSeries& s, const Matrix& a, Index mode) {
  ModeLayout l = mode_layout(s.dims(), mode);
  if (a.cols() != l.extent) {
    throw std::invalid_argument("mode product: matrix has " + std::to_string(a.cols()) + " columns, mode " +
                                std::to_string(mode) + " has extent " + std::to_string(l.extent));
  }
  TensorSeries out(replace_dim(s.dims(), mode, a.rows()), s.length());
  l.outer *= s.length();
  apply_mode(s.data().data(), out.data().data(), l, a);
  return out;
}

TensorSeries multi_mode_product(const TensorSeries& s, std::span<const Matrix> mats) {
  if (static_cast<Index>(mats.size()) != s.order()) {
    throw std::invalid_argument("expected one matrix per mode (" + std::to_string(s.order()) + "), got " +
                                std::to_string(mats.size()));
  }
  TensorSeries out = s;
  for (Index m = 0; m < s.order(); ++m) out = mode_product(out, mats[static_cast<std::size_t>(m)], m);
  return out;
}

Matrix mode_gram(const Tensor& x, const Tensor& y, Index mode) {
  if (x.dims() != y.dims()) throw std::invalid_argument("mode_gram: shape mismatch");
  return m_flatten(x, mode) * m_flatten(y, mode).transpose();
}

Vector vectorize(const Tensor& x) { return x.data(); }

Matrix flatten_series(const TensorSeries& s, Index mode) {
  ModeLayout l = mode_layout(s.dims(), mode);
  l.outer *= s.length();
  return flatten_raw(s.data().data(), l);
}

Tensor temporal_mean(const TensorSeries& s) { return Tensor(s.dims(), s.data().rowwise().mean()); }

TensorSeries center(const TensorSeries& s) {
  Matrix c = s.data();
  c.colwise() -= c.rowwise().mean();
  return TensorSeries(s.dims(), std::move(c));
}

}  // namespace tbss
