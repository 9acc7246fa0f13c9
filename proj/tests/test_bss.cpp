#include "oracles.hpp"
#include "tbss/bss.hpp"
#include "tbss/eval.hpp"
#include "tbss/simgen.hpp"

#include <gtest/gtest.h>

using namespace tbss;

namespace {

const Method kAll[] = {Method::fobi,  Method::jade,  Method::sobi,  Method::gfobi,  Method::gjade,
                       Method::tfobi, Method::tjade, Method::tsobi, Method::tgfobi, Method::tgjade};

double max_abs(const Matrix& m) { return m.cwiseAbs().maxCoeff(); }

TensorSeries simulated(Setting setting, Index length, std::uint64_t seed, bool mixed) {
  Rng rng(seed);
  const Dims dims{3, 2, 2};
  TensorSeries z = gen_latent_setting(setting, dims, length, rng);
  if (!mixed) return z;
  return mix(z, gen_mixing(dims, MixingKind::gaussian, rng));
}

}  // namespace

TEST(Methods, NamesRoundTrip) {
  for (Method m : kAll) EXPECT_EQ(parse_method(method_name(m)), m);
  EXPECT_EQ(parse_method("TSOBI"), Method::tsobi);
  EXPECT_THROW(parse_method("ica"), std::invalid_argument);
}

TEST(Methods, CounterpartsAndFamilies) {
  for (Method m : kAll) {
    EXPECT_NE(is_tensor_method(m), is_tensor_method(counterpart(m)));
    EXPECT_EQ(counterpart(counterpart(m)), m);
    EXPECT_EQ(method_family(m), method_family(counterpart(m)));
  }
  EXPECT_EQ(counterpart(Method::tsobi), Method::sobi);
  EXPECT_EQ(method_family(Method::tfobi), Family::gfobi);
  EXPECT_EQ(method_family(Method::jade), Family::gjade);
}

TEST(Methods, DefaultLagSets) {
  EXPECT_EQ(method_config(Method::tsobi).lags, LagSet::range(1, 12));
  EXPECT_EQ(method_config(Method::tgfobi).lags, LagSet::range(0, 12));
  EXPECT_EQ(method_config(Method::gjade).lags, LagSet::range(0, 12));
  EXPECT_EQ(method_config(Method::tfobi).lags, LagSet::parse("0"));
  EXPECT_EQ(method_config(Method::tsobi, LagSet::parse("1,3")).lags, LagSet::parse("1,3"));
  EXPECT_NO_THROW(method_config(Method::jade, LagSet::parse("0")));
  EXPECT_THROW(method_config(Method::fobi, LagSet::parse("0:2")), std::invalid_argument);
}

TEST(Whitening, VectorWhitenedCovarianceIsIdentity) {
  std::mt19937_64 rng(1);
  const Matrix a = oracle::random_matrix(4, 4, rng);
  Matrix x = a * oracle::random_matrix(4, 500, rng);
  x.colwise() -= x.rowwise().mean();
  const VectorWhitening w = whiten_vector(x);
  EXPECT_LT(max_abs(w.whitened * w.whitened.transpose() / 500.0 - Matrix::Identity(4, 4)), 1e-10);
}

TEST(Whitening, TensorWhitenersAreModeCovInverseRoots) {
  const TensorSeries x = center(simulated(Setting::sv, 400, 2, true));
  const TensorWhitening w = whiten_tensor(x);
  for (Index m = 0; m < 3; ++m) {
    const Matrix s = mode_cov(x, m).entries;
    const Matrix& g = w.whiteners[static_cast<std::size_t>(m)];
    EXPECT_LT(max_abs(g * s * g - Matrix::Identity(s.rows(), s.cols())), 1e-10);
  }
}

TEST(Whitening, RankDeficientModeIsReported) {
  std::mt19937_64 rng(3);
  Matrix d = oracle::random_matrix(12, 100, rng);
  // Both slices of the third mode are identical, so its covariance has rank 1.
  d.bottomRows(6) = d.topRows(6);
  const TensorSeries s({3, 2, 2}, d);
  try {
    unmix(s, Method::tfobi);
    FAIL() << "expected RankDeficiencyError";
  } catch (const RankDeficiencyError& e) {
    EXPECT_EQ(e.mode(), 2);
    EXPECT_NE(std::string(e.what()).find("mode 3"), std::string::npos);
  }
}

TEST(Unmix, RecoversArmaSources) {
  const TensorSeries x = simulated(Setting::arma, 4000, 4, true);
  Rng rng(4);
  const Dims dims{3, 2, 2};
  gen_latent_setting(Setting::arma, dims, 4000, rng);
  const std::vector<Matrix> a = gen_mixing(dims, MixingKind::gaussian, rng);
  const UnmixingResult u = unmix(x, Method::tsobi);
  EXPECT_LT(mdi(kron_unmixing(u.mode_unmixers), kron_unmixing(a)).value, 0.15);
  for (const JointDiagResult& d : u.diagnostics) EXPECT_TRUE(d.converged);
}

TEST(Unmix, RecoveredSeriesIsWhitenedAndConsistent) {
  const TensorSeries x = simulated(Setting::sv, 600, 5, true);
  for (Method m : {Method::tgjade, Method::jade}) {
    const UnmixingResult u = unmix(x, m);
    EXPECT_LT(max_abs(apply_unmixing(x, u).data() - u.recovered.data()), 1e-10);
    EXPECT_LT(u.recovered.data().rowwise().mean().cwiseAbs().maxCoeff(), 1e-10);
    for (std::size_t k = 0; k < u.rotations.size(); ++k) {
      const Matrix& r = u.rotations[k];
      EXPECT_LT(max_abs(r.transpose() * r - Matrix::Identity(r.rows(), r.cols())), 1e-12);
      EXPECT_LT(max_abs(u.mode_unmixers[k] - r.transpose() * u.whiteners[k]), 1e-12);
    }
  }
}

TEST(Unmix, VectorMethodsVectorizeFrames) {
  const TensorSeries x = simulated(Setting::arma, 500, 6, true);
  const UnmixingResult u = unmix(x, Method::sobi);
  ASSERT_EQ(u.mode_unmixers.size(), 1u);
  EXPECT_EQ(u.mode_unmixers[0].rows(), 12);
  const UnmixingResult v = unmix_vector(x.data(), method_config(Method::sobi));
  EXPECT_EQ(u.mode_unmixers[0], v.mode_unmixers[0]);
  EXPECT_EQ(u.recovered.dims(), (Dims{12}));
}

TEST(Unmix, TfobiEqualsTgfobiAtLagZero) {
  const TensorSeries x = simulated(Setting::sv, 500, 7, true);
  const UnmixingResult a = unmix(x, Method::tfobi);
  const UnmixingResult b = unmix(x, Method::tgfobi, LagSet::parse("0"));
  for (std::size_t m = 0; m < 3; ++m) EXPECT_EQ(a.mode_unmixers[m], b.mode_unmixers[m]);
  const UnmixingResult c = unmix(x, Method::tjade);
  const UnmixingResult d = unmix(x, Method::tgjade, LagSet::parse("0"));
  for (std::size_t m = 0; m < 3; ++m) EXPECT_EQ(c.mode_unmixers[m], d.mode_unmixers[m]);
}

TEST(Unmix, TensorMethodsAreOrthogonallyEquivariant) {
  const TensorSeries x = simulated(Setting::sv, 1500, 12, true);
  std::mt19937_64 rng(13);
  const std::vector<Matrix> u{oracle::random_orthogonal(3, rng), oracle::random_orthogonal(2, rng),
                              oracle::random_orthogonal(2, rng)};
  const TensorSeries y = mix(x, u);
  for (Method m : {Method::tfobi, Method::tjade, Method::tsobi, Method::tgfobi, Method::tgjade}) {
    const Matrix gx = kron_unmixing(unmix(x, m).mode_unmixers);
    const Matrix gy = kron_unmixing(unmix(y, m).mode_unmixers);
    EXPECT_LT(mdi(gy * kron_unmixing(u), gx.inverse()).value, 1e-6) << method_name(m);
  }
}

TEST(Unmix, GjadeSetSizes) {
  const TensorSeries x = simulated(Setting::sv, 300, 8, false);
  MethodConfig cfg = method_config(Method::tgjade, LagSet::parse("0,1"));
  const TensorSeries st = whiten_tensor(center(x)).standardized;
  EXPECT_EQ(mode_matrix_set(st, 0, cfg).size(), 2u * 9u);
  cfg.gjade_upper_only = true;
  EXPECT_EQ(mode_matrix_set(st, 0, cfg).size(), 2u * 6u);
}

TEST(Unmix, TooShortSeries) {
  const TensorSeries x = simulated(Setting::arma, 12, 9, false);
  EXPECT_THROW(unmix(x, Method::tsobi), std::invalid_argument);
}

TEST(Unmix, ApplyChecksShape) {
  const TensorSeries x = simulated(Setting::arma, 300, 10, false);
  const UnmixingResult u = unmix(x, Method::tsobi);
  EXPECT_THROW(apply_unmixing(TensorSeries({2, 6}, Matrix::Zero(12, 3)), u), std::invalid_argument);
  const UnmixingResult v = unmix(x, Method::sobi);
  EXPECT_NO_THROW(apply_unmixing(TensorSeries({2, 6}, Matrix::Zero(12, 3)), v));
  EXPECT_THROW(apply_unmixing(TensorSeries({11}, Matrix::Zero(11, 3)), v), std::invalid_argument);
}

TEST(Unmix, IdentityResult) {
  const Tensor mean({3, 2});
  const UnmixingResult u = UnmixingResult::identity(mean);
  std::mt19937_64 rng(11);
  const TensorSeries s({3, 2}, oracle::random_matrix(6, 4, rng));
  EXPECT_EQ(apply_unmixing(s, u).data(), s.data());
}
