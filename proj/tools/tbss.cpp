// tbss: command-line driver for tensor blind source separation.
//
//   tbss simulate --setting arma --mixing gaussian --dims 3,2,2 --T 1000 --seed 1 --out sim
//   tbss unmix    --in sim/X.txt --method tsobi --lags 1:12 --out fit
//   tbss evaluate --unmixers fit/unmixers.txt --mixing-file sim/A.txt
//   tbss bench    --config desk.cfg --out bench_out
//   tbss rank     --in fit/recovered.txt
//
// Exit codes: 0 success, 1 usage/config/file error, 2 numerical failure.

#include "tbss/bss.hpp"
#include "tbss/eval.hpp"
#include "tbss/experiment.hpp"
#include "tbss/series_io.hpp"
#include "tbss/simgen.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitNumerical = 2;

struct SimulateArgs {
  std::string setting = "arma";
  std::string mixing = "gaussian";
  std::string dims = "3,2,2";
  tbss::Index length = 1000;
  std::uint64_t seed = 1;
  std::string out = "sim";
};

struct UnmixArgs {
  std::string in;
  std::string method;
  std::string lags;
  std::string out = "unmix_out";
};

struct EvaluateArgs {
  std::string unmixers;
  std::string mixing_file;
  std::string recovered;
  std::string targets;
  std::string out;
};

struct BenchArgs {
  std::string config;
  std::vector<std::pair<std::string, std::string>> overrides;
  bool quiet = false;
};

struct RankArgs {
  std::string in;
  std::string out;
};

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw tbss::FormatError("cannot create directory '" + dir + "': " + ec.message());
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream os(path);
  if (!os) throw tbss::FormatError("cannot write '" + path.string() + "'");
  return os;
}

void emit_json(const json& doc, const std::string& path) {
  if (path.empty()) {
    std::cout << doc.dump(2) << '\n';
  } else {
    open_out(path) << doc.dump(2) << '\n';
  }
}

json one_based(const tbss::Dims& cell) {
  json out = json::array();
  for (tbss::Index i : cell) out.push_back(i + 1);
  return out;
}

int cmd_simulate(const SimulateArgs& a) {
  tbss::ExperimentSpec spec;
  tbss::set_experiment_field(spec, "setting", a.setting);
  tbss::set_experiment_field(spec, "mixing", a.mixing);
  tbss::set_experiment_field(spec, "dims", a.dims);
  tbss::set_experiment_field(spec, "T", std::to_string(a.length));
  if (spec.settings.size() != 1 || spec.mixings.size() != 1) {
    throw tbss::SpecError("setting/mixing: simulate takes a single value each");
  }
  spec.methods = {tbss::Method::fobi};
  spec.validate();

  const tbss::Setting setting = spec.settings.front();
  const tbss::MixingKind mixing = spec.mixings.front();
  // Same stream as replicate 0 of a bench run with this seed.
  tbss::Rng rng = tbss::replicate_rng(a.seed, 0, setting, mixing, a.length);
  const tbss::TensorSeries z = tbss::gen_latent_setting(setting, spec.dims, a.length, rng);
  const std::vector<tbss::Matrix> mixing_mats = tbss::gen_mixing(spec.dims, mixing, rng);
  const tbss::TensorSeries x = tbss::mix(z, mixing_mats);

  ensure_dir(a.out);
  const fs::path dir(a.out);
  tbss::save_series((dir / "Z.txt").string(), z);
  tbss::save_series((dir / "X.txt").string(), x);
  tbss::save_matrices((dir / "A.txt").string(), mixing_mats);
  std::cout << "wrote " << (dir / "Z.txt").string() << ", " << (dir / "X.txt").string() << ", "
            << (dir / "A.txt").string() << '\n';
  return 0;
}

json diagnostics_json(const tbss::UnmixingResult& u, tbss::Method method, const std::optional<tbss::LagSet>& lags) {
  const tbss::MethodConfig cfg = tbss::method_config(method, lags);
  json doc;
  doc["method"] = tbss::method_name(method);
  doc["lags"] = cfg.lags.lags();
  json modes = json::array();
  for (std::size_t m = 0; m < u.diagnostics.size(); ++m) {
    const tbss::JointDiagResult& d = u.diagnostics[m];
    modes.push_back({{"mode", m + 1},
                     {"sweeps", d.sweeps_used},
                     {"converged", d.converged},
                     {"objective", d.objective},
                     {"trace", d.trace}});
  }
  doc["modes"] = std::move(modes);
  return doc;
}

int cmd_unmix(const UnmixArgs& a) {
  const tbss::Method method = tbss::parse_method(a.method);
  std::optional<tbss::LagSet> lags;
  if (!a.lags.empty()) lags = tbss::LagSet::parse(a.lags);
  const tbss::TensorSeries x = tbss::load_series(a.in);
  const tbss::UnmixingResult u = tbss::unmix(x, method, lags);

  ensure_dir(a.out);
  const fs::path dir(a.out);
  tbss::save_series((dir / "recovered.txt").string(), u.recovered);
  tbss::save_matrices((dir / "unmixers.txt").string(), u.mode_unmixers);
  emit_json(diagnostics_json(u, method, lags), (dir / "diagnostics.json").string());
  std::cout << "wrote " << (dir / "recovered.txt").string() << ", " << (dir / "unmixers.txt").string() << ", "
            << (dir / "diagnostics.json").string() << '\n';
  return 0;
}

int cmd_evaluate(const EvaluateArgs& a) {
  const bool mdi_mode = !a.unmixers.empty() || !a.mixing_file.empty();
  const bool corr_mode = !a.recovered.empty() || !a.targets.empty();
  if (mdi_mode == corr_mode) {
    throw CLI::ValidationError("evaluate needs either --unmixers with --mixing-file, or --recovered with --targets");
  }
  json doc;
  if (mdi_mode) {
    if (a.unmixers.empty() || a.mixing_file.empty()) {
      throw CLI::ValidationError("--unmixers and --mixing-file must be given together");
    }
    const std::vector<tbss::Matrix> gammas = tbss::load_matrices(a.unmixers);
    const std::vector<tbss::Matrix> mixing = tbss::load_matrices(a.mixing_file);
    const tbss::Matrix gamma = tbss::kron_unmixing(gammas);
    const tbss::Matrix omega = tbss::kron_unmixing(mixing);
    if (gamma.rows() != gamma.cols() || gamma.cols() != omega.rows() || omega.rows() != omega.cols()) {
      throw std::invalid_argument("dimension mismatch: unmixer is " + std::to_string(gamma.rows()) + "x" +
                                  std::to_string(gamma.cols()) + ", mixing is " + std::to_string(omega.rows()) + "x" +
                                  std::to_string(omega.cols()));
    }
    const tbss::MdiValue v = tbss::mdi(gamma, omega);
    doc["metric"] = "mdi";
    doc["mdi"] = v.value;
    doc["p"] = gamma.rows();
    doc["unmixer_modes"] = gammas.size();
    doc["mixing_modes"] = mixing.size();
  } else {
    if (a.recovered.empty() || a.targets.empty()) {
      throw CLI::ValidationError("--recovered and --targets must be given together");
    }
    const tbss::TensorSeries rec = tbss::load_series(a.recovered);
    const tbss::TensorSeries targ = tbss::load_series(a.targets);
    std::vector<tbss::Index> skipped;
    const auto matches = tbss::max_abs_correlations(rec, targ.data(), &skipped);
    doc["metric"] = "max_abs_correlation";
    json rows = json::array();
    for (std::size_t i = 0; i < matches.size(); ++i) {
      rows.push_back({{"target", i + 1},
                      {"component", matches[i].component < 0 ? json(nullptr) : json(matches[i].component + 1)},
                      {"max_abs_corr", matches[i].max_abs_corr}});
    }
    doc["targets"] = std::move(rows);
    json skip = json::array();
    for (tbss::Index k : skipped) skip.push_back(k + 1);
    doc["skipped_components"] = std::move(skip);
  }
  emit_json(doc, a.out);
  return 0;
}

int cmd_bench(const BenchArgs& a) {
  tbss::ExperimentSpec spec = a.config.empty() ? tbss::ExperimentSpec{} : tbss::load_experiment(a.config);
  for (const auto& [key, value] : a.overrides) tbss::set_experiment_field(spec, key, value);
  spec.validate();

  tbss::ProgressFn progress;
  if (!a.quiet) {
    progress = [](std::size_t done, std::size_t total) {
      std::cerr << "\rreplicates " << done << "/" << total << std::flush;
      if (done == total) std::cerr << '\n';
    };
  }
  const tbss::RunManifest manifest = tbss::run_bench(spec, progress);

  ensure_dir(spec.out);
  const fs::path dir(spec.out);
  {
    auto os = open_out(dir / "manifest.json");
    tbss::write_manifest_json(os, manifest);
  }
  {
    auto os = open_out(dir / "summary.csv");
    tbss::write_summary_csv(os, manifest);
  }
  tbss::write_summary_csv(std::cout, manifest);
  int failed = 0;
  for (const auto& agg : manifest.aggregates) failed += agg.n_failed;
  if (failed > 0) std::cerr << failed << " method runs failed and were excluded from the means\n";
  std::cerr << "wrote " << (dir / "manifest.json").string() << ", " << (dir / "summary.csv").string() << " ("
            << manifest.wall_seconds << " s)\n";
  return 0;
}

int cmd_rank(const RankArgs& a) {
  const tbss::TensorSeries rec = tbss::load_series(a.in);
  const tbss::KurtosisRanking ranking = tbss::kurtosis_rank(rec);
  json doc;
  doc["dims"] = rec.dims();
  json ranked = json::array();
  for (std::size_t k = 0; k < ranking.ranked.size(); ++k) {
    const tbss::KurtosisEntry& e = ranking.ranked[k];
    ranked.push_back({{"rank", k + 1}, {"cell", one_based(e.cell)}, {"excess_kurtosis", e.excess_kurtosis}});
  }
  doc["ranked"] = std::move(ranked);
  json excluded = json::array();
  for (tbss::Index k : ranking.excluded) excluded.push_back(k + 1);
  doc["excluded_components"] = std::move(excluded);
  emit_json(doc, a.out);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Blind source separation for tensor-valued time series"};
  app.set_version_flag("--version", std::string(tbss::kVersion));
  app.require_subcommand(1);

  SimulateArgs sim;
  auto* simulate = app.add_subcommand("simulate", "Generate latent series Z, mixed series X and mixing matrices A");
  simulate->add_option("--setting", sim.setting, "arma or sv")->capture_default_str();
  simulate->add_option("--mixing", sim.mixing, "gaussian or haar")->capture_default_str();
  simulate->add_option("--dims", sim.dims, "Tensor dimensions, e.g. 3,2,2")->capture_default_str();
  simulate->add_option("--T", sim.length, "Series length")->capture_default_str();
  simulate->add_option("--seed", sim.seed, "Master seed")->capture_default_str();
  simulate->add_option("--out", sim.out, "Output directory")->capture_default_str();

  UnmixArgs um;
  auto* unmix = app.add_subcommand("unmix", "Estimate the unmixing transformation of a series");
  unmix->add_option("--in", um.in, "Input series file")->required();
  unmix->add_option("--method", um.method, "fobi jade sobi gfobi gjade tfobi tjade tsobi tgfobi tgjade")->required();
  unmix->add_option("--lags", um.lags, "Lag set, a:b or a,b,c (default depends on the method)");
  unmix->add_option("--out", um.out, "Output directory")->capture_default_str();

  EvaluateArgs ev;
  auto* evaluate = app.add_subcommand("evaluate", "MDI against a mixing, or correlations against target signals");
  evaluate->add_option("--unmixers", ev.unmixers, "Unmixer matrices file");
  evaluate->add_option("--mixing-file", ev.mixing_file, "Mixing matrices file");
  evaluate->add_option("--recovered", ev.recovered, "Recovered series file");
  evaluate->add_option("--targets", ev.targets, "Target series file (one target per cell)");
  evaluate->add_option("--out", ev.out, "Write the JSON report here instead of stdout");

  BenchArgs bn;
  auto* bench = app.add_subcommand("bench", "Monte-Carlo comparison of the methods");
  bench->add_option("--config", bn.config, "Experiment config file");
  auto override_opt = [&](const char* flag, const char* key, const char* help) {
    bench->add_option_function<std::string>(
        flag, [&bn, key](const std::string& v) { bn.overrides.emplace_back(key, v); }, help);
  };
  override_opt("--setting", "setting", "Comma-separated settings: arma, sv");
  override_opt("--mixing", "mixing", "Comma-separated mixings: gaussian, haar");
  override_opt("--dims", "dims", "Tensor dimensions");
  override_opt("--T", "T", "Comma-separated series lengths");
  override_opt("--methods,--method", "methods", "Comma-separated methods");
  override_opt("--lags-sobi", "lags.sobi", "Lag set for the sobi family");
  override_opt("--lags-gfobi", "lags.gfobi", "Lag set for the gfobi family");
  override_opt("--lags-gjade", "lags.gjade", "Lag set for the gjade family");
  override_opt("--reps", "reps", "Replicates per cell");
  override_opt("--seed", "seed", "Master seed");
  override_opt("--out", "out", "Output directory");
  override_opt("--threads", "threads", "Worker threads (0: all cores)");
  bench->add_flag("--quiet", bn.quiet, "No progress output");

  RankArgs rk;
  auto* rank = app.add_subcommand("rank", "Rank recovered components by excess kurtosis");
  rank->add_option("--in", rk.in, "Recovered series file")->required();
  rank->add_option("--out", rk.out, "Write the JSON report here instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (*simulate) return cmd_simulate(sim);
    if (*unmix) return cmd_unmix(um);
    if (*evaluate) return cmd_evaluate(ev);
    if (*bench) return cmd_bench(bn);
    if (*rank) return cmd_rank(rk);
  } catch (const tbss::RankDeficiencyError& e) {
    std::cerr << "numerical error: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const tbss::NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const CLI::Error& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}
