#ifndef TBSS_BSS_HPP
#define TBSS_BSS_HPP

#include "tbss/linalg.hpp"
#include "tbss/moments.hpp"
#include "tbss/tensor.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace tbss {

/// Which moment family fills the matrices that get jointly diagonalized.
enum class Family {
  sobi,   ///< symmetrized lagged autocovariances
  gfobi,  ///< lagged fourth-order B matrices
  gjade,  ///< lagged cumulant-type C matrices over all (i, j)
};

struct MethodConfig {
  Family family = Family::sobi;
  LagSet lags = LagSet::range(1, 12);
  JointDiagOptions diag{};
  /// gjade only: keep just i <= j. The default uses every (i, j) pair.
  bool gjade_upper_only = false;

  /// sobi: lags 1..12; gfobi and gjade: lags 0..12.
  static MethodConfig defaults(Family family);
};

/// The ten estimators. fobi/jade (and tfobi/tjade) are gfobi/gjade with the
/// single lag 0.
enum class Method { fobi, jade, sobi, gfobi, gjade, tfobi, tjade, tsobi, tgfobi, tgjade };

std::string_view method_name(Method m);
Method parse_method(std::string_view name);
std::string_view family_name(Family f);
bool is_tensor_method(Method m);
Family method_family(Method m);
/// The vector method corresponding to a tensor method and vice versa.
Method counterpart(Method m);
/// Default configuration for a method; `lags` overrides the default lag set
/// (not allowed to differ from {0} for fobi/jade/tfobi/tjade).
MethodConfig method_config(Method m, const std::optional<LagSet>& lags = std::nullopt);

struct VectorWhitening {
  VectorSeries whitened;
  Matrix whitener;  ///< Sigma_0^{-1/2}
};

struct TensorWhitening {
  TensorSeries standardized;
  std::vector<Matrix> whiteners;  ///< (Sigma_0^m)^{-1/2}, one per mode
};

struct UnmixingResult {
  /// Gamma^m = U_m^T (Sigma_0^m)^{-1/2}; a single matrix on the vector path.
  std::vector<Matrix> mode_unmixers;
  /// Centered input transformed by every Gamma^m. The vector path yields an
  /// order-1 series.
  TensorSeries recovered;
  std::vector<Matrix> whiteners;
  std::vector<Matrix> rotations;  ///< U_m
  std::vector<JointDiagResult> diagnostics;
  /// Temporal mean of the training series, removed before unmixing.
  Tensor mean;

  /// Identity unmixers for the given mean, e.g. for pass-through tests.
  static UnmixingResult identity(const Tensor& mean);
};

/// Whitening with the symmetric inverse square root of the covariance.
VectorWhitening whiten_vector(const VectorSeries& centered);

/// Simultaneous standardization of all modes using the mode covariances of
/// the input (not re-estimated between modes).
TensorWhitening whiten_tensor(const TensorSeries& centered);

/// The matrix set for the vector estimators, from a whitened series.
std::vector<Matrix> vector_matrix_set(const VectorSeries& whitened, const MethodConfig& cfg);

/// The matrix set for one mode of the tensor estimators, from a standardized series.
std::vector<Matrix> mode_matrix_set(const TensorSeries& standardized, Index mode, const MethodConfig& cfg);

/// SOBI / gFOBI / gJADE on a p x T series: center, whiten, jointly
/// diagonalize, Gamma = U^T W.
UnmixingResult unmix_vector(const VectorSeries& s, const MethodConfig& cfg);

/// TSOBI / TgFOBI / TgJADE on a tensor series.
UnmixingResult unmix_tensor(const TensorSeries& s, const MethodConfig& cfg);

/// Runs a method by name. Vector methods on tensor input act on the
/// vectorized frames.
UnmixingResult unmix(const TensorSeries& s, Method m, const std::optional<LagSet>& lags = std::nullopt);

/// Removes the training mean and applies every Gamma^m. Order-1 results
/// (vector methods) accept any series whose frame size matches.
TensorSeries apply_unmixing(const TensorSeries& s, const UnmixingResult& u);

}  // namespace tbss

#endif  // TBSS_BSS_HPP
