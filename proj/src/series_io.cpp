#include "tbss/series_io.hpp"

#include <cctype>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace tbss {

namespace {

void put_double(std::ostream& os, double v) {
  char buf[32];
  const int n = std::snprintf(buf, sizeof buf, "%.17g", v);
  os.write(buf, n);
}

Index parse_index(const std::string& text, const std::string& what) {
  Index value = 0;
  const char* first = text.data();
  const char* last = first + text.size();
  while (first != last && std::isspace(static_cast<unsigned char>(*first))) ++first;
  while (last != first && std::isspace(static_cast<unsigned char>(last[-1]))) --last;
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last) throw FormatError("invalid " + what + ": '" + text + "'");
  return value;
}

std::string expect_prefix(const std::string& field, const std::string& key) {
  if (field.rfind(key + "=", 0) != 0) throw FormatError("expected '" + key + "=' but found '" + field + "'");
  return field.substr(key.size() + 1);
}

std::string next_nonempty_line(std::istream& is, const char* context) {
  std::string line;
  while (std::getline(is, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") != std::string::npos) return line;
  }
  throw FormatError(std::string("unexpected end of input while reading ") + context);
}

Vector parse_row(const std::string& line, Index expected, const char* context) {
  Vector row(expected);
  const char* p = line.c_str();
  for (Index k = 0; k < expected; ++k) {
    char* end = nullptr;
    const double v = std::strtod(p, &end);
    if (end == p) {
      throw FormatError(std::string(context) + ": expected " + std::to_string(expected) + " values, found " +
                        std::to_string(k));
    }
    row[k] = v;
    p = end;
  }
  while (*p == ' ' || *p == '\t') ++p;
  if (*p != '\0') throw FormatError(std::string(context) + ": more than " + std::to_string(expected) + " values");
  return row;
}

template <class F>
auto with_file(const std::string& path, std::ios::openmode mode, F&& f) {
  std::fstream fs(path, mode);
  if (!fs) throw FormatError("cannot open '" + path + "'");
  return f(fs);
}

}  // namespace

Dims parse_dims(const std::string& text) {
  Dims dims;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) dims.push_back(parse_index(item, "dimension"));
  try {
    check_dims(dims);
  } catch (const std::invalid_argument& e) {
    throw FormatError(e.what());
  }
  return dims;
}

void write_series(std::ostream& os, const TensorSeries& s) {
  os << "dims=" << dims_to_string(s.dims()) << ";T=" << s.length() << '\n';
  const Matrix& data = s.data();
  for (Index t = 0; t < s.length(); ++t) {
    for (Index k = 0; k < data.rows(); ++k) {
      if (k) os << ' ';
      put_double(os, data(k, t));
    }
    os << '\n';
  }
}

TensorSeries read_series(std::istream& is) {
  const std::string header = next_nonempty_line(is, "series header");
  const auto semi = header.find(';');
  if (semi == std::string::npos) throw FormatError("series header must look like 'dims=...;T=...'");
  const Dims dims = parse_dims(expect_prefix(header.substr(0, semi), "dims"));
  const Index length = parse_index(expect_prefix(header.substr(semi + 1), "T"), "series length");
  if (length < 1) throw FormatError("series length must be at least 1");
  Matrix data(dims_size(dims), length);
  for (Index t = 0; t < length; ++t) {
    data.col(t) = parse_row(next_nonempty_line(is, "series frame"), data.rows(), "series frame");
  }
  return TensorSeries(dims, std::move(data));
}

void save_series(const std::string& path, const TensorSeries& s) {
  with_file(path, std::ios::out | std::ios::trunc, [&](std::fstream& fs) { write_series(fs, s); });
}

TensorSeries load_series(const std::string& path) {
  return with_file(path, std::ios::in, [](std::fstream& fs) { return read_series(fs); });
}

void write_matrices(std::ostream& os, const std::vector<Matrix>& mats) {
  os << "matrices=" << mats.size() << '\n';
  for (const Matrix& m : mats) {
    os << "rows=" << m.rows() << ";cols=" << m.cols() << '\n';
    for (Index i = 0; i < m.rows(); ++i) {
      for (Index j = 0; j < m.cols(); ++j) {
        if (j) os << ' ';
        put_double(os, m(i, j));
      }
      os << '\n';
    }
  }
}

std::vector<Matrix> read_matrices(std::istream& is) {
  const Index count = parse_index(expect_prefix(next_nonempty_line(is, "matrix list header"), "matrices"),
                                  "matrix count");
  std::vector<Matrix> mats;
  for (Index k = 0; k < count; ++k) {
    const std::string shape = next_nonempty_line(is, "matrix shape");
    const auto semi = shape.find(';');
    if (semi == std::string::npos) throw FormatError("matrix shape must look like 'rows=..;cols=..'");
    const Index rows = parse_index(expect_prefix(shape.substr(0, semi), "rows"), "row count");
    const Index cols = parse_index(expect_prefix(shape.substr(semi + 1), "cols"), "column count");
    Matrix m(rows, cols);
    for (Index i = 0; i < rows; ++i) m.row(i) = parse_row(next_nonempty_line(is, "matrix row"), cols, "matrix row");
    mats.push_back(std::move(m));
  }
  return mats;
}

void save_matrices(const std::string& path, const std::vector<Matrix>& mats) {
  with_file(path, std::ios::out | std::ios::trunc, [&](std::fstream& fs) { write_matrices(fs, mats); });
}

std::vector<Matrix> load_matrices(const std::string& path) {
  return with_file(path, std::ios::in, [](std::fstream& fs) { return read_matrices(fs); });
}

}  // namespace tbss
