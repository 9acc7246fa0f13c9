#include "oracles.hpp"
#include "tbss/series_io.hpp"

#include <gtest/gtest.h>

#include <sstream>

using namespace tbss;

TEST(SeriesIo, RoundTripIsExact) {
  std::mt19937_64 rng(1);
  const TensorSeries s({3, 2, 2}, oracle::random_matrix(12, 6, rng) * 1e-3);
  std::stringstream ss;
  write_series(ss, s);
  const TensorSeries back = read_series(ss);
  EXPECT_EQ(back.dims(), s.dims());
  EXPECT_EQ(back.data(), s.data());
}

TEST(SeriesIo, HeaderFormat) {
  const TensorSeries s({2, 1}, Matrix::Ones(2, 3));
  std::stringstream ss;
  write_series(ss, s);
  std::string header;
  std::getline(ss, header);
  EXPECT_EQ(header, "dims=2,1;T=3");
}

TEST(SeriesIo, RejectsMalformedInput) {
  for (const char* text : {"", "dims=2;T=2\n1 2\n", "dims=2;T=1\n1\n", "dims=2;T=1\n1 x\n", "shape=2;T=1\n1 2\n",
                           "dims=2;T=1\n1 2 3\n"}) {
    std::stringstream ss(text);
    EXPECT_THROW(read_series(ss), FormatError) << text;
  }
}

TEST(SeriesIo, MatricesRoundTrip) {
  std::mt19937_64 rng(2);
  const std::vector<Matrix> mats{oracle::random_matrix(3, 3, rng), oracle::random_matrix(2, 4, rng)};
  std::stringstream ss;
  write_matrices(ss, mats);
  const std::vector<Matrix> back = read_matrices(ss);
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back[0], mats[0]);
  EXPECT_EQ(back[1], mats[1]);
}

TEST(SeriesIo, ParseDims) {
  EXPECT_EQ(parse_dims("3,2,2"), (Dims{3, 2, 2}));
  EXPECT_EQ(parse_dims(" 12 "), (Dims{12}));
  EXPECT_THROW(parse_dims("3,,2"), FormatError);
  EXPECT_THROW(parse_dims("3,0"), FormatError);
  EXPECT_THROW(parse_dims("a"), FormatError);
}

TEST(SeriesIo, MissingFile) { EXPECT_THROW(load_series("/nonexistent/x.txt"), FormatError); }
