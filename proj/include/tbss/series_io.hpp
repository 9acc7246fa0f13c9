#ifndef TBSS_SERIES_IO_HPP
#define TBSS_SERIES_IO_HPP

#include "tbss/tensor.hpp"

#include <iosfwd>
#include <string>
#include <vector>

// Plain-text file formats.
//
// Tensor series:
//     dims=p1,...,pr;T=<T>
//     <prod p values of frame 1, linear layout, whitespace separated>
//     ...                                  (T lines)
//
// Matrix list:
//     matrices=<k>
//     rows=<r>;cols=<c>
//     <c values of row 1>
//     ...                                  (r lines, repeated per matrix)
//
// Values are written with 17 significant digits so reading back is exact.
namespace tbss {

/// Thrown for malformed or unreadable files.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

void write_series(std::ostream& os, const TensorSeries& s);
TensorSeries read_series(std::istream& is);
void save_series(const std::string& path, const TensorSeries& s);
TensorSeries load_series(const std::string& path);

void write_matrices(std::ostream& os, const std::vector<Matrix>& mats);
std::vector<Matrix> read_matrices(std::istream& is);
void save_matrices(const std::string& path, const std::vector<Matrix>& mats);
std::vector<Matrix> load_matrices(const std::string& path);

/// Parses "3,2,2" into dims.
Dims parse_dims(const std::string& text);

}  // namespace tbss

#endif  // TBSS_SERIES_IO_HPP
