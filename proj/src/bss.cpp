#include "tbss/bss.hpp"

#include <algorithm>
#include <array>
#include <cctype>

namespace tbss {

namespace {

struct MethodInfo {
  Method method;
  std::string_view name;
  Family family;
  bool tensor;
  bool iid;  // lag set pinned to {0}
};

constexpr std::array<MethodInfo, 10> kMethods{{
    {Method::fobi, "fobi", Family::gfobi, false, true},
    {Method::jade, "jade", Family::gjade, false, true},
    {Method::sobi, "sobi", Family::sobi, false, false},
    {Method::gfobi, "gfobi", Family::gfobi, false, false},
    {Method::gjade, "gjade", Family::gjade, false, false},
    {Method::tfobi, "tfobi", Family::gfobi, true, true},
    {Method::tjade, "tjade", Family::gjade, true, true},
    {Method::tsobi, "tsobi", Family::sobi, true, false},
    {Method::tgfobi, "tgfobi", Family::gfobi, true, false},
    {Method::tgjade, "tgjade", Family::gjade, true, false},
}};

const MethodInfo& info(Method m) {
  for (const MethodInfo& i : kMethods) {
    if (i.method == m) return i;
  }
  throw std::invalid_argument("unknown method");
}

void check_length(Index length, const MethodConfig& cfg) {
  if (length <= cfg.lags.max()) {
    throw std::invalid_argument("series length " + std::to_string(length) + " must exceed the largest lag " +
                                std::to_string(cfg.lags.max()));
  }
}

void append_gjade(std::vector<Matrix>& set, const std::vector<Matrix>& all, Index p, bool upper_only) {
  for (Index j = 0; j < p; ++j) {
    for (Index i = 0; i < p; ++i) {
      if (upper_only && i > j) continue;
      set.push_back(all[static_cast<std::size_t>(i + p * j)]);
    }
  }
}

}  // namespace

MethodConfig MethodConfig::defaults(Family family) {
  MethodConfig cfg;
  cfg.family = family;
  cfg.lags = family == Family::sobi ? LagSet::range(1, 12) : LagSet::range(0, 12);
  return cfg;
}

std::string_view method_name(Method m) { return info(m).name; }

Method parse_method(std::string_view name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
  for (const MethodInfo& i : kMethods) {
    if (i.name == lower) return i.method;
  }
  throw std::invalid_argument("unknown method '" + std::string(name) +
                              "' (expected fobi, jade, sobi, gfobi, gjade, tfobi, tjade, tsobi, tgfobi or tgjade)");
}

std::string_view family_name(Family f) {
  switch (f) {
    case Family::sobi:
      return "sobi";
    case Family::gfobi:
      return "gfobi";
    case Family::gjade:
      return "gjade";
  }
  return "?";
}

bool is_tensor_method(Method m) { return info(m).tensor; }

Family method_family(Method m) { return info(m).family; }

Method counterpart(Method m) {
  const MethodInfo& mi = info(m);
  for (const MethodInfo& i : kMethods) {
    if (i.family == mi.family && i.iid == mi.iid && i.tensor != mi.tensor) return i.method;
  }
  throw std::logic_error("method without counterpart");
}

MethodConfig method_config(Method m, const std::optional<LagSet>& lags) {
  const MethodInfo& mi = info(m);
  MethodConfig cfg = MethodConfig::defaults(mi.family);
  if (mi.iid) {
    if (lags && *lags != LagSet({0})) {
      throw std::invalid_argument(std::string(mi.name) + " uses the single lag 0; got lags " + lags->to_string());
    }
    cfg.lags = LagSet({0});
  } else if (lags) {
    cfg.lags = *lags;
  }
  return cfg;
}

UnmixingResult UnmixingResult::identity(const Tensor& mean) {
  std::vector<Matrix> eye;
  for (Index d : mean.dims()) eye.push_back(Matrix::Identity(d, d));
  return UnmixingResult{eye, TensorSeries(mean.dims(), 1), eye, eye, {}, mean};
}

VectorWhitening whiten_vector(const VectorSeries& centered) {
  const Matrix w = sym_inv_sqrt(sigma_tau(centered, 0, false).entries);
  return VectorWhitening{w * centered, w};
}

TensorWhitening whiten_tensor(const TensorSeries& centered) {
  std::vector<Matrix> whiteners;
  for (Index m = 0; m < centered.order(); ++m) {
    try {
      whiteners.push_back(sym_inv_sqrt(mode_cov(centered, m).entries));
    } catch (const RankDeficiencyError& e) {
      throw RankDeficiencyError(e.ratio(), m);
    }
  }
  TensorSeries standardized = multi_mode_product(centered, whiteners);
  return TensorWhitening{std::move(standardized), std::move(whiteners)};
}

std::vector<Matrix> vector_matrix_set(const VectorSeries& whitened, const MethodConfig& cfg) {
  std::vector<Matrix> set;
  for (int tau : cfg.lags) {
    switch (cfg.family) {
      case Family::sobi:
        set.push_back(sigma_tau(whitened, tau, true).entries);
        break;
      case Family::gfobi:
        set.push_back(b_tau(whitened, tau).entries);
        break;
      case Family::gjade:
        append_gjade(set, c_tau_ij_all(whitened, tau), whitened.rows(), cfg.gjade_upper_only);
        break;
    }
  }
  return set;
}

std::vector<Matrix> mode_matrix_set(const TensorSeries& standardized, Index mode, const MethodConfig& cfg) {
  std::vector<Matrix> set;
  for (int tau : cfg.lags) {
    switch (cfg.family) {
      case Family::sobi:
        set.push_back(mode_autocov(standardized, mode, tau, true).entries);
        break;
      case Family::gfobi:
        set.push_back(mode_b_tau(standardized, mode, tau).entries);
        break;
      case Family::gjade:
        append_gjade(set, mode_c_tau_ij_all(standardized, mode, tau), standardized.dims()[static_cast<std::size_t>(mode)],
                           cfg.gjade_upper_only);
        break;
    }
  }
  return set;
}

UnmixingResult unmix_vector(const VectorSeries& s, const MethodConfig& cfg) {
  if (s.rows() < 2) throw std::invalid_argument("vector unmixing needs at least two components");
  check_length(s.cols(), cfg);

  const Vector mean = s.rowwise().mean();
  Matrix centered = s;
  centered.colwise() -= mean;

  VectorWhitening white = whiten_vector(centered);
  const std::vector<Matrix> set = vector_matrix_set(white.whitened, cfg);
  JointDiagResult jd = joint_diagonalize(set, cfg.diag);
  Matrix gamma = jd.rotation.transpose() * white.whitener;
  Matrix recovered = gamma * centered;

  const Dims dims{s.rows()};
  return UnmixingResult{{std::move(gamma)},
                        TensorSeries(dims, std::move(recovered)),
                        {std::move(white.whitener)},
                        {jd.rotation},
                        {std::move(jd)},
                        Tensor(dims, mean)};
}

UnmixingResult unmix_tensor(const TensorSeries& s, const MethodConfig& cfg) {
  check_length(s.length(), cfg);

  const Tensor mean = temporal_mean(s);
  const TensorSeries centered = center(s);
  TensorWhitening white = whiten_tensor(centered);

  UnmixingResult res{{}, centered, {}, {}, {}, mean};
  for (Index m = 0; m < s.order(); ++m) {
    const std::vector<Matrix> set = mode_matrix_set(white.standardized, m, cfg);
    JointDiagResult jd = joint_diagonalize(set, cfg.diag);
    res.mode_unmixers.push_back(jd.rotation.transpose() * white.whiteners[static_cast<std::size_t>(m)]);
    res.rotations.push_back(jd.rotation);
    res.diagnostics.push_back(std::move(jd));
  }
  res.whiteners = std::move(white.whiteners);
  res.recovered = multi_mode_product(centered, res.mode_unmixers);
  return res;
}

UnmixingResult unmix(const TensorSeries& s, Method m, const std::optional<LagSet>& lags) {
  const MethodConfig cfg = method_config(m, lags);
  if (is_tensor_method(m)) return unmix_tensor(s, cfg);
  return unmix_vector(s.data(), cfg);
}

TensorSeries apply_unmixing(const TensorSeries& s, const UnmixingResult& u) {
  if (u.mean.order() == 1 && u.mode_unmixers.size() == 1) {
    if (s.frame_size() != u.mean.size()) {
      throw std::invalid_argument("apply_unmixing: frame size " + std::to_string(s.frame_size()) +
                                  " does not match unmixer size " + std::to_string(u.mean.size()));
    }
    Matrix centered = s.data();
    centered.colwise() -= u.mean.data();
    const Matrix& gamma = u.mode_unmixers.front();
    return TensorSeries(Dims{gamma.rows()}, gamma * centered);
  }
  if (s.dims() != u.mean.dims()) {
    throw std::invalid_argument("apply_unmixing: series dims " + dims_to_string(s.dims()) +
                                " do not match unmixer dims " + dims_to_string(u.mean.dims()));
  }
  Matrix centered = s.data();
  centered.colwise() -= u.mean.data();
  return multi_mode_product(TensorSeries(s.dims(), std::move(centered)), u.mode_unmixers);
}

}  // namespace tbss
