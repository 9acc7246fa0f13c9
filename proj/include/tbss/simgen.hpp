#ifndef TBSS_SIMGEN_HPP
#define TBSS_SIMGEN_HPP

#include "tbss/tensor.hpp"

#include <limits>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

/// Latent component generators, mixing samplers and the two simulation
/// settings (ARMA and stochastic volatility) on 3 x 2 x 2 tensors.
///
/// Every generator draws only from the engine it is given, discards a
/// burn-in of kBurnIn steps and returns a series standardized to zero sample
/// mean and unit sample variance.
namespace tbss {

using Rng = std::mt19937_64;

inline constexpr Index kBurnIn = 1000;

/// x_t = sum_k ar_k x_{t-k} + e_t + sum_k ma_k e_{t-k}, e_t ~ N(0, 1).
struct ArmaSpec {
  std::vector<double> ar;
  std::vector<double> ma;
};

/// y_t = s_t e_t, s_t^2 = omega + sum_k alpha_k y_{t-k}^2 + sum_k beta_k s_{t-k}^2
/// with omega = 1 - sum alpha - sum beta and e_t ~ N(0, 1).
struct GarchSpec {
  std::vector<double> alpha;
  std::vector<double> beta;
};

/// h_t = mu + phi (h_{t-1} - mu) + sigma eta_t, y_t = exp(h_t / 2) e_t with
/// e_t a unit-variance t_nu variable (Gaussian when nu is infinite).
struct SvSpec {
  double mu = 0.0;
  double phi = 0.0;
  double sigma = 0.0;
  double nu = std::numeric_limits<double>::infinity();
};

/// A random-coefficient MA(q) whose coefficients are drawn U(-1, 1) when the
/// component is instantiated.
struct RandomMaSpec {
  int order = 0;
};

using ComponentSpec = std::variant<ArmaSpec, GarchSpec, SvSpec, RandomMaSpec>;

std::string describe(const ComponentSpec& spec);

Vector gen_arma(const ArmaSpec& spec, Index length, Rng& rng);
Vector gen_garch(const GarchSpec& spec, Index length, Rng& rng);
Vector gen_sv(const SvSpec& spec, Index length, Rng& rng);
Vector gen_component(const ComponentSpec& spec, Index length, Rng& rng);

/// Zero sample mean, unit sample variance (divisor n). Throws NumericalError
/// for non-finite or constant input.
Vector standardize(const Vector& x);

enum class Setting { arma, sv };
std::string_view setting_name(Setting s);
Setting parse_setting(std::string_view name);

/// The twelve component models of a setting, in cell order.
std::vector<ComponentSpec> setting_components(Setting setting);

/// Twelve independent components placed into the cells of a tensor of
/// dims `dims` (product must be 12) in linear-layout order.
TensorSeries gen_latent_setting(Setting setting, const Dims& dims, Index length, Rng& rng);

enum class MixingKind { gaussian, haar };
std::string_view mixing_name(MixingKind k);
MixingKind parse_mixing(std::string_view name);

inline constexpr double kMaxMixingCondition = 1e6;

/// One square matrix per mode. Gaussian: i.i.d. N(0, 1) entries, redrawn while
/// the condition number exceeds kMaxMixingCondition. Haar: Q from the QR
/// factorization of a Gaussian matrix with the signs of diag(R) folded in.
std::vector<Matrix> gen_mixing(const Dims& dims, MixingKind kind, Rng& rng);

/// z x_1 A_1 ... x_r A_r, frame by frame.
TensorSeries mix(const TensorSeries& z, std::span<const Matrix> mixing);

}  // namespace tbss

#endif  // TBSS_SIMGEN_HPP
