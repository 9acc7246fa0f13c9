#ifndef TBSS_EXPERIMENT_HPP
#define TBSS_EXPERIMENT_HPP

#include "tbss/bss.hpp"
#include "tbss/simgen.hpp"

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace tbss {

inline constexpr const char* kVersion = "0.1.0";

/// Invalid experiment configuration; the message names the offending field.
class SpecError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A Monte-Carlo design: every (setting, mixing, T, replicate) gets one
/// simulated dataset to which every listed method is applied.
///
/// Config file grammar (one `key = value` per line, `#` starts a comment,
/// list items separated by commas, lag sets as `a:b` or `a,b,c`):
///
///     setting     = arma, sv
///     mixing      = gaussian, haar
///     dims        = 3,2,2
///     T           = 1000, 2000, 4000
///     methods     = tsobi, tgfobi, tgjade, sobi
///     lags.sobi   = 1:12
///     lags.gfobi  = 0:12
///     lags.gjade  = 0:12
///     reps        = 100
///     seed        = 1
///     out         = bench_out
///     threads     = 0
struct ExperimentSpec {
  std::vector<Setting> settings{Setting::arma};
  std::vector<MixingKind> mixings{MixingKind::gaussian};
  Dims dims{3, 2, 2};
  std::vector<Index> lengths{1000};
  std::vector<Method> methods{Method::fobi,  Method::jade,  Method::sobi,  Method::gfobi,  Method::gjade,
                              Method::tfobi, Method::tjade, Method::tsobi, Method::tgfobi, Method::tgjade};
  LagSet sobi_lags = LagSet::range(1, 12);
  LagSet gfobi_lags = LagSet::range(0, 12);
  LagSet gjade_lags = LagSet::range(0, 12);
  int replicates = 100;
  std::uint64_t seed = 1;
  std::string out = "bench_out";
  int threads = 0;  ///< 0: one per hardware thread

  /// Lag set handed to a method; empty for the lag-0 methods.
  std::optional<LagSet> lags_for(Method m) const;

  /// Throws SpecError when an invariant fails.
  void validate() const;
};

ExperimentSpec parse_experiment(std::istream& is);
ExperimentSpec load_experiment(const std::string& path);
/// Applies one `key = value` assignment; used by the parser and CLI overrides.
void set_experiment_field(ExperimentSpec& spec, const std::string& key, const std::string& value);
/// The spec in config-file syntax.
std::string format_experiment(const ExperimentSpec& spec);

/// Engine for one replicate: seeded from (seed + replicate) together with the
/// setting, mixing and length, so streams do not depend on scheduling.
Rng replicate_rng(std::uint64_t seed, int replicate, Setting setting, MixingKind mixing, Index length);

struct ReplicateRecord {
  Setting setting;
  MixingKind mixing;
  Index length;
  int replicate;
  Method method;
  double mdi;  ///< NaN when the replicate failed
  bool ok;
  bool converged;
  std::string error;
};

struct Aggregate {
  Setting setting;
  MixingKind mixing;
  Method method;
  Index length;
  double mean_mdi;
  double se_mdi;
  int n_ok;
  int n_failed;
};

struct RunManifest {
  ExperimentSpec spec;
  std::vector<ReplicateRecord> records;
  std::vector<Aggregate> aggregates;
  double wall_seconds = 0.0;
  std::string version = kVersion;

  const Aggregate& aggregate(Setting s, MixingKind k, Method m, Index length) const;
};

/// Unmixer estimate compared against the true mixing: the Kronecker product
/// of the mode unmixers for tensor methods, the single matrix otherwise.
Matrix combined_unmixer(const UnmixingResult& u);

using ProgressFn = std::function<void(std::size_t done, std::size_t total)>;

/// Runs every replicate (in parallel across replicates) and aggregates the
/// mean and standard error of the MDI per (setting, mixing, method, T).
RunManifest run_bench(const ExperimentSpec& spec, const ProgressFn& progress = {});

void write_manifest_json(std::ostream& os, const RunManifest& manifest);
/// Header: setting,mixing,method,T,mean_mdi,se_mdi,n_ok
void write_summary_csv(std::ostream& os, const RunManifest& manifest);

}  // namespace tbss

#endif  // TBSS_EXPERIMENT_HPP
