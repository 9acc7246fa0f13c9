#include "tbss/simgen.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

namespace tbss {

namespace {

std::string join(const std::vector<double>& v) {
  std::ostringstream os;
  for (std::size_t k = 0; k < v.size(); ++k) os << (k ? "," : "") << v[k];
  return os.str();
}

double sum(const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0); }

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

}  // namespace

std::string describe(const ComponentSpec& spec) {
  std::ostringstream os;
  std::visit(Overloaded{
                 [&](const ArmaSpec& s) { os << "ARMA(" << s.ar.size() << "," << s.ma.size() << ") ar=[" << join(s.ar)
                                             << "] ma=[" << join(s.ma) << "]"; },
                 [&](const GarchSpec& s) { os << "GARCH(" << s.alpha.size() << "," << s.beta.size() << ") alpha=["
                                              << join(s.alpha) << "] beta=[" << join(s.beta) << "]"; },
                 [&](const SvSpec& s) { os << "SV(" << s.mu << "," << s.phi << "," << s.sigma << "," << s.nu << ")"; },
                 [&](const RandomMaSpec& s) { os << "MA(" << s.order << ") ~ U(-1,1)"; },
             },
             spec);
  return os.str();
}

Vector standardize(const Vector& x) {
  if (!x.allFinite()) throw NumericalError("generated series is not finite (explosive parameters?)");
  Vector c = x.array() - x.mean();
  const double var = c.squaredNorm() / static_cast<double>(c.size());
  if (!(var > 0.0) || !std::isfinite(var)) throw NumericalError("generated series has zero or infinite variance");
  return c / std::sqrt(var);
}

Vector gen_arma(const ArmaSpec& spec, Index length, Rng& rng) {
  if (length < 1) throw std::invalid_argument("series length must be at least 1");
  std::normal_distribution<double> normal;
  const Index p = static_cast<Index>(spec.ar.size());
  const Index q = static_cast<Index>(spec.ma.size());
  const Index total = kBurnIn + length;

  // e[k + q] is the innovation at time k; the first q draws are pre-sample.
  Vector e(total + q);
  for (Index k = 0; k < e.size(); ++k) e[k] = normal(rng);

  Vector x = Vector::Zero(total);
  for (Index t = 0; t < total; ++t) {
    double v = e[t + q];
    for (Index k = 1; k <= q; ++k) v += spec.ma[static_cast<std::size_t>(k - 1)] * e[t + q - k];
    for (Index k = 1; k <= p && k <= t; ++k) v += spec.ar[static_cast<std::size_t>(k - 1)] * x[t - k];
    x[t] = v;
  }
  return standardize(x.tail(length));
}

Vector gen_garch(const GarchSpec& spec, Index length, Rng& rng) {
  if (length < 1) throw std::invalid_argument("series length must be at least 1");
  for (double a : spec.alpha) {
    if (!(a >= 0.0)) throw std::invalid_argument("GARCH alpha coefficients must be non-negative");
  }
  for (double b : spec.beta) {
    if (!(b >= 0.0)) throw std::invalid_argument("GARCH beta coefficients must be non-negative");
  }
  const double persistence = sum(spec.alpha) + sum(spec.beta);
  if (!(persistence < 1.0)) throw std::invalid_argument("GARCH requires sum(alpha) + sum(beta) < 1");
  const double omega = 1.0 - persistence;

  std::normal_distribution<double> normal;
  const Index p = static_cast<Index>(spec.alpha.size());
  const Index q = static_cast<Index>(spec.beta.size());
  const Index total = kBurnIn + length;
  // Pre-sample squared returns and conditional variances are 1.
  Vector y2 = Vector::Ones(total);
  Vector s2 = Vector::Ones(total);
  Vector y(total);
  for (Index t = 0; t < total; ++t) {
    double v = omega;
    for (Index k = 1; k <= p; ++k) v += spec.alpha[static_cast<std::size_t>(k - 1)] * (t >= k ? y2[t - k] : 1.0);
    for (Index k = 1; k <= q; ++k) v += spec.beta[static_cast<std::size_t>(k - 1)] * (t >= k ? s2[t - k] : 1.0);
    s2[t] = v;
    y[t] = std::sqrt(v) * normal(rng);
    y2[t] = y[t] * y[t];
  }
  return standardize(y.tail(length));
}

Vector gen_sv(const SvSpec& spec, Index length, Rng& rng) {
  if (length < 1) throw std::invalid_argument("series length must be at least 1");
  if (!(std::abs(spec.phi) < 1.0)) throw std::invalid_argument("SV requires |phi| < 1");
  if (!(spec.sigma > 0.0)) throw std::invalid_argument("SV requires sigma > 0");
  const bool gaussian = std::isinf(spec.nu) && spec.nu > 0.0;
  if (!gaussian && !(spec.nu > 2.0)) throw std::invalid_argument("SV requires nu > 2 or nu = inf");

  std::normal_distribution<double> normal;
  std::student_t_distribution<double> student(gaussian ? 3.0 : spec.nu);
  const double t_scale = gaussian ? 1.0 : std::sqrt((spec.nu - 2.0) / spec.nu);

  const Index total = kBurnIn + length;
  Vector y(total);
  double h = spec.mu + spec.sigma / std::sqrt(1.0 - spec.phi * spec.phi) * normal(rng);
  for (Index t = 0; t < total; ++t) {
    h = spec.mu + spec.phi * (h - spec.mu) + spec.sigma * normal(rng);
    const double eps = gaussian ? normal(rng) : t_scale * student(rng);
    y[t] = std::exp(0.5 * h) * eps;
  }
  return standardize(y.tail(length));
}

Vector gen_component(const ComponentSpec& spec, Index length, Rng& rng) {
  return std::visit(Overloaded{
                        [&](const ArmaSpec& s) { return gen_arma(s, length, rng); },
                        [&](const GarchSpec& s) { return gen_garch(s, length, rng); },
                        [&](const SvSpec& s) { return gen_sv(s, length, rng); },
                        [&](const RandomMaSpec& s) {
                          std::uniform_real_distribution<double> unif(-1.0, 1.0);
                          ArmaSpec arma;
                          for (int k = 0; k < s.order; ++k) arma.ma.push_back(unif(rng));
                          return gen_arma(arma, length, rng);
                        },
                    },
                    spec);
}

std::string_view setting_name(Setting s) { return s == Setting::arma ? "arma" : "sv"; }

Setting parse_setting(std::string_view name) {
  if (name == "arma") return Setting::arma;
  if (name == "sv") return Setting::sv;
  throw std::invalid_argument("unknown setting '" + std::string(name) + "' (expected arma or sv)");
}

std::vector<ComponentSpec> setting_components(Setting setting) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  if (setting == Setting::arma) {
    return {
        ArmaSpec{{0.9}, {}},
        ArmaSpec{{-0.9}, {}},
        ArmaSpec{{}, {0.5, -0.5}},
        ArmaSpec{{-0.5, -0.3}, {}},
        ArmaSpec{{0.5, -0.3, 0.1, -0.1}, {0.7, -0.3}},
        ArmaSpec{{-0.7, 0.1}, {0.9, 0.3, 0.1, -0.1}},
        RandomMaSpec{5},
        RandomMaSpec{10},
        RandomMaSpec{20},
        RandomMaSpec{30},
        RandomMaSpec{40},
        RandomMaSpec{50},
    };
  }
  return {
      SvSpec{-10.0, 0.98, 0.2, inf},
      SvSpec{-5.0, -0.98, 0.2, 10.0},
      SvSpec{-10.0, 0.7, 0.7, inf},
      SvSpec{-5.0, -0.70, 0.7, 10.0},
      SvSpec{-9.0, 0.20, 0.01, inf},
      SvSpec{-9.0, -0.20, 0.01, 10.0},
      GarchSpec{{0.7}, {}},
      GarchSpec{{0.2}, {0.2}},
      GarchSpec{{0.1}, {0.8}},
      GarchSpec{{0.20, 0.10, 0.05, 0.01}, {}},
      GarchSpec{{0.05, 0.03, 0.01}, {0.5}},
      GarchSpec{{0.20, 0.14, 0.12, 0.10, 0.05, 0.05, 0.04, 0.03, 0.02, 0.01}, {}},
  };
}

TensorSeries gen_latent_setting(Setting setting, const Dims& dims, Index length, Rng& rng) {
  check_dims(dims);
  const std::vector<ComponentSpec> comps = setting_components(setting);
  if (dims_size(dims) != static_cast<Index>(comps.size())) {
    throw std::invalid_argument("the " + std::string(setting_name(setting)) + " setting has " +
                                std::to_string(comps.size()) + " components but dims " + dims_to_string(dims) +
                                " hold " + std::to_string(dims_size(dims)));
  }
  Matrix data(dims_size(dims), length);
  for (std::size_t k = 0; k < comps.size(); ++k) {
    data.row(static_cast<Index>(k)) = gen_component(comps[k], length, rng).transpose();
  }
  return TensorSeries(dims, std::move(data));
}

std::string_view mixing_name(MixingKind k) { return k == MixingKind::gaussian ? "gaussian" : "haar"; }

MixingKind parse_mixing(std::string_view name) {
  if (name == "gaussian") return MixingKind::gaussian;
  if (name == "haar") return MixingKind::haar;
  throw std::invalid_argument("unknown mixing '" + std::string(name) + "' (expected gaussian or haar)");
}

std::vector<Matrix> gen_mixing(const Dims& dims, MixingKind kind, Rng& rng) {
  check_dims(dims);
  std::normal_distribution<double> normal;
  auto gaussian = [&](Index p) {
    Matrix a(p, p);
    for (Index j = 0; j < p; ++j) {
      for (Index i = 0; i < p; ++i) a(i, j) = normal(rng);
    }
    return a;
  };

  std::vector<Matrix> out;
  for (Index p : dims) {
    if (kind == MixingKind::gaussian) {
      for (;;) {
        Matrix a = gaussian(p);
        const Vector sv = Eigen::JacobiSVD<Matrix>(a).singularValues();
        if (sv[p - 1] > 0.0 && sv[0] / sv[p - 1] <= kMaxMixingCondition) {
          out.push_back(std::move(a));
          break;
        }
      }
    } else {
      const Eigen::HouseholderQR<Matrix> qr(gaussian(p));
      const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
      Matrix q = qr.householderQ() * Matrix::Identity(p, p);
      for (Index k = 0; k < p; ++k) {
        if (r(k, k) < 0.0) q.col(k) = -q.col(k);
      }
      out.push_back(std::move(q));
    }
  }
  return out;
}

TensorSeries mix(const TensorSeries& z, std::span<const Matrix> mixing) {
  for (std::size_t m = 0; m < mixing.size(); ++m) {
    if (mixing[m].rows() != mixing[m].cols()) throw std::invalid_argument("mixing matrices must be square");
  }
  return multi_mode_product(z, mixing);
}

}  // namespace tbss
