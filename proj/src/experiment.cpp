#include "tbss/experiment.hpp"

#include "tbss/eval.hpp"
#include "tbss/series_io.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <mutex>
#include <sstream>
#include <thread>

namespace tbss {

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return {};
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

std::vector<std::string> split_list(const std::string& value) {
  std::vector<std::string> out;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

template <class T>
T parse_number(const std::string& key, const std::string& text) {
  T value{};
  const std::string t = trim(text);
  auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
  if (ec != std::errc() || ptr != t.data() + t.size()) throw SpecError(key + ": invalid number '" + text + "'");
  return value;
}

template <class T, class F>
std::vector<T> parse_list(const std::string& key, const std::string& value, F&& parse_one) {
  std::vector<T> out;
  for (const std::string& item : split_list(value)) {
    try {
      out.push_back(parse_one(item));
    } catch (const SpecError&) {
      throw;
    } catch (const std::exception& e) {
      throw SpecError(key + ": " + e.what());
    }
  }
  if (out.empty()) throw SpecError(key + ": empty list");
  return out;
}

template <class T, class F>
std::string join(const std::vector<T>& items, F&& fmt) {
  std::ostringstream os;
  for (std::size_t k = 0; k < items.size(); ++k) os << (k ? ", " : "") << fmt(items[k]);
  return os.str();
}

std::size_t task_index(const ExperimentSpec& spec, std::size_t s, std::size_t k, std::size_t l, int rep) {
  return ((s * spec.mixings.size() + k) * spec.lengths.size() + l) * static_cast<std::size_t>(spec.replicates) +
         static_cast<std::size_t>(rep);
}

}  // namespace

std::optional<LagSet> ExperimentSpec::lags_for(Method m) const {
  if (m == Method::fobi || m == Method::jade || m == Method::tfobi || m == Method::tjade) return std::nullopt;
  switch (method_family(m)) {
    case Family::sobi:
      return sobi_lags;
    case Family::gfobi:
      return gfobi_lags;
    case Family::gjade:
      return gjade_lags;
  }
  return std::nullopt;
}

void ExperimentSpec::validate() const {
  if (settings.empty()) throw SpecError("setting: at least one setting is required");
  if (mixings.empty()) throw SpecError("mixing: at least one mixing kind is required");
  if (methods.empty()) throw SpecError("methods: at least one method is required");
  if (lengths.empty()) throw SpecError("T: at least one series length is required");
  if (replicates < 1) throw SpecError("reps: must be at least 1");
  if (threads < 0) throw SpecError("threads: must be non-negative");
  try {
    check_dims(dims);
  } catch (const std::invalid_argument& e) {
    throw SpecError(std::string("dims: ") + e.what());
  }
  for (Setting s : settings) {
    const auto n = static_cast<Index>(setting_components(s).size());
    if (dims_size(dims) != n) {
      throw SpecError("dims: the " + std::string(setting_name(s)) + " setting needs " + std::to_string(n) +
                      " cells, dims " + dims_to_string(dims) + " have " + std::to_string(dims_size(dims)));
    }
  }
  int max_lag = 0;
  for (Method m : methods) {
    if (const auto lags = lags_for(m)) max_lag = std::max(max_lag, lags->max());
  }
  for (Index t : lengths) {
    if (t < 2 * (max_lag + 1)) {
      throw SpecError("T: length " + std::to_string(t) + " is below 2 * (max lag + 1) = " +
                      std::to_string(2 * (max_lag + 1)));
    }
  }
}

void set_experiment_field(ExperimentSpec& spec, const std::string& raw_key, const std::string& value) {
  const std::string key = trim(raw_key);
  auto lagset = [&](const std::string& text) {
    try {
      return LagSet::parse(text);
    } catch (const std::exception& e) {
      throw SpecError(key + ": " + e.what());
    }
  };
  if (key == "setting") {
    spec.settings = parse_list<Setting>(key, value, [](const std::string& s) { return parse_setting(s); });
  } else if (key == "mixing") {
    spec.mixings = parse_list<MixingKind>(key, value, [](const std::string& s) { return parse_mixing(s); });
  } else if (key == "dims") {
    spec.dims = parse_list<Index>(key, value, [&](const std::string& s) { return parse_number<Index>(key, s); });
  } else if (key == "T") {
    spec.lengths = parse_list<Index>(key, value, [&](const std::string& s) { return parse_number<Index>(key, s); });
  } else if (key == "methods") {
    spec.methods = parse_list<Method>(key, value, [](const std::string& s) { return parse_method(s); });
  } else if (key == "lags.sobi") {
    spec.sobi_lags = lagset(value);
  } else if (key == "lags.gfobi") {
    spec.gfobi_lags = lagset(value);
  } else if (key == "lags.gjade") {
    spec.gjade_lags = lagset(value);
  } else if (key == "reps") {
    spec.replicates = parse_number<int>(key, value);
  } else if (key == "seed") {
    spec.seed = parse_number<std::uint64_t>(key, value);
  } else if (key == "out") {
    spec.out = trim(value);
    if (spec.out.empty()) throw SpecError("out: empty path");
  } else if (key == "threads") {
    spec.threads = parse_number<int>(key, value);
  } else {
    throw SpecError("unknown field '" + key + "'");
  }
}

ExperimentSpec parse_experiment(std::istream& is) {
  ExperimentSpec spec;
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw SpecError("line " + std::to_string(lineno) + ": expected 'key = value', got '" + line + "'");
    }
    set_experiment_field(spec, line.substr(0, eq), line.substr(eq + 1));
  }
  spec.validate();
  return spec;
}

ExperimentSpec load_experiment(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw FormatError("cannot open '" + path + "'");
  return parse_experiment(is);
}

std::string format_experiment(const ExperimentSpec& spec) {
  std::ostringstream os;
  os << "setting = " << join(spec.settings, setting_name) << '\n'
     << "mixing = " << join(spec.mixings, mixing_name) << '\n'
     << "dims = " << dims_to_string(spec.dims) << '\n'
     << "T = " << join(spec.lengths, [](Index t) { return t; }) << '\n'
     << "methods = " << join(spec.methods, method_name) << '\n'
     << "lags.sobi = " << spec.sobi_lags.to_string() << '\n'
     << "lags.gfobi = " << spec.gfobi_lags.to_string() << '\n'
     << "lags.gjade = " << spec.gjade_lags.to_string() << '\n'
     << "reps = " << spec.replicates << '\n'
     << "seed = " << spec.seed << '\n'
     << "out = " << spec.out << '\n'
     << "threads = " << spec.threads << '\n';
  return os.str();
}

Rng replicate_rng(std::uint64_t seed, int replicate, Setting setting, MixingKind mixing, Index length) {
  const std::uint64_t base = seed + static_cast<std::uint64_t>(replicate);
  std::seed_seq seq{static_cast<std::uint32_t>(base & 0xffffffffu), static_cast<std::uint32_t>(base >> 32),
                    static_cast<std::uint32_t>(setting), static_cast<std::uint32_t>(mixing),
                    static_cast<std::uint32_t>(length)};
  return Rng(seq);
}

Matrix combined_unmixer(const UnmixingResult& u) { return kron_unmixing(u.mode_unmixers); }

const Aggregate& RunManifest::aggregate(Setting s, MixingKind k, Method m, Index length) const {
  for (const Aggregate& a : aggregates) {
    if (a.setting == s && a.mixing == k && a.method == m && a.length == length) return a;
  }
  throw std::out_of_range("no aggregate for the requested cell");
}

RunManifest run_bench(const ExperimentSpec& spec, const ProgressFn& progress) {
  spec.validate();
  const auto start = std::chrono::steady_clock::now();

  const std::size_t n_tasks = spec.settings.size() * spec.mixings.size() * spec.lengths.size() *
                              static_cast<std::size_t>(spec.replicates);
  const std::size_t n_methods = spec.methods.size();
  std::vector<ReplicateRecord> records(n_tasks * n_methods);

  auto run_task = [&](std::size_t s, std::size_t k, std::size_t l, int rep) {
    const Setting setting = spec.settings[s];
    const MixingKind mixing = spec.mixings[k];
    const Index length = spec.lengths[l];
    const std::size_t base = task_index(spec, s, k, l, rep) * n_methods;
    for (std::size_t j = 0; j < n_methods; ++j) {
      records[base + j] = {setting, mixing, length, rep, spec.methods[j], std::nan(""), false, false, {}};
    }
    Rng rng = replicate_rng(spec.seed, rep, setting, mixing, length);
    std::optional<TensorSeries> x;
    Matrix omega;
    try {
      const TensorSeries z = gen_latent_setting(setting, spec.dims, length, rng);
      const std::vector<Matrix> a = gen_mixing(spec.dims, mixing, rng);
      x = mix(z, a);
      omega = kron_unmixing(a);
    } catch (const std::exception& e) {
      for (std::size_t j = 0; j < n_methods; ++j) records[base + j].error = std::string("simulation: ") + e.what();
      return;
    }
    for (std::size_t j = 0; j < n_methods; ++j) {
      ReplicateRecord& r = records[base + j];
      try {
        const UnmixingResult u = unmix(*x, r.method, spec.lags_for(r.method));
        r.mdi = mdi(combined_unmixer(u), omega).value;
        r.ok = std::isfinite(r.mdi);
        r.converged = std::all_of(u.diagnostics.begin(), u.diagnostics.end(),
                                  [](const JointDiagResult& d) { return d.converged; });
        if (!r.ok) r.error = "non-finite MDI";
      } catch (const std::exception& e) {
        r.error = e.what();
      }
    }
  };

  std::vector<std::tuple<std::size_t, std::size_t, std::size_t, int>> tasks;
  for (std::size_t s = 0; s < spec.settings.size(); ++s) {
    for (std::size_t k = 0; k < spec.mixings.size(); ++k) {
      for (std::size_t l = 0; l < spec.lengths.size(); ++l) {
        for (int rep = 0; rep < spec.replicates; ++rep) tasks.emplace_back(s, k, l, rep);
      }
    }
  }

  std::atomic<std::size_t> next{0};
  std::atomic<std::size_t> done{0};
  std::mutex progress_mutex;
  auto worker = [&] {
    for (std::size_t t = next++; t < tasks.size(); t = next++) {
      const auto [s, k, l, rep] = tasks[t];
      run_task(s, k, l, rep);
      const std::size_t finished = ++done;
      if (progress) {
        std::lock_guard lock(progress_mutex);
        progress(finished, tasks.size());
      }
    }
  };
  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const std::size_t n_threads =
      std::min<std::size_t>(tasks.size(), spec.threads > 0 ? static_cast<std::size_t>(spec.threads) : hw);
  {
    std::vector<std::jthread> pool;
    for (std::size_t w = 1; w < n_threads; ++w) pool.emplace_back(worker);
    worker();
  }

  RunManifest manifest;
  manifest.spec = spec;
  for (std::size_t s = 0; s < spec.settings.size(); ++s) {
    for (std::size_t k = 0; k < spec.mixings.size(); ++k) {
      for (std::size_t j = 0; j < n_methods; ++j) {
        for (std::size_t l = 0; l < spec.lengths.size(); ++l) {
          double total = 0.0;
          double total_sq = 0.0;
          int n_ok = 0;
          for (int rep = 0; rep < spec.replicates; ++rep) {
            const ReplicateRecord& r = records[task_index(spec, s, k, l, rep) * n_methods + j];
            if (!r.ok) continue;
            ++n_ok;
            total += r.mdi;
            total_sq += r.mdi * r.mdi;
          }
          Aggregate a{spec.settings[s], spec.mixings[k], spec.methods[j], spec.lengths[l], std::nan(""), std::nan(""),
                      n_ok, spec.replicates - n_ok};
          if (n_ok > 0) {
            a.mean_mdi = total / n_ok;
            a.se_mdi = 0.0;
            if (n_ok > 1) {
              const double var = std::max(0.0, (total_sq - n_ok * a.mean_mdi * a.mean_mdi) / (n_ok - 1));
              a.se_mdi = std::sqrt(var / n_ok);
            }
          }
          manifest.aggregates.push_back(a);
        }
      }
    }
  }
  manifest.records = std::move(records);
  manifest.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return manifest;
}

void write_manifest_json(std::ostream& os, const RunManifest& manifest) {
  using nlohmann::json;
  const ExperimentSpec& spec = manifest.spec;
  auto number = [](double v) { return std::isfinite(v) ? json(v) : json(nullptr); };

  json doc;
  doc["version"] = manifest.version;
  doc["seed"] = spec.seed;
  doc["wall_seconds"] = manifest.wall_seconds;
  json echo;
  for (Setting s : spec.settings) echo["setting"].push_back(setting_name(s));
  for (MixingKind k : spec.mixings) echo["mixing"].push_back(mixing_name(k));
  echo["dims"] = spec.dims;
  echo["T"] = spec.lengths;
  for (Method m : spec.methods) echo["methods"].push_back(method_name(m));
  echo["lags"] = {{"sobi", spec.sobi_lags.lags()}, {"gfobi", spec.gfobi_lags.lags()}, {"gjade", spec.gjade_lags.lags()}};
  echo["reps"] = spec.replicates;
  echo["seed"] = spec.seed;
  echo["out"] = spec.out;
  doc["spec"] = echo;

  json recs = json::array();
  for (const ReplicateRecord& r : manifest.records) {
    json rec{{"setting", setting_name(r.setting)}, {"mixing", mixing_name(r.mixing)}, {"T", r.length},
             {"replicate", r.replicate},           {"method", method_name(r.method)},  {"mdi", number(r.mdi)},
             {"ok", r.ok},                         {"converged", r.converged}};
    if (!r.error.empty()) rec["error"] = r.error;
    recs.push_back(std::move(rec));
  }
  doc["replicates"] = std::move(recs);

  json aggs = json::array();
  for (const Aggregate& a : manifest.aggregates) {
    aggs.push_back({{"setting", setting_name(a.setting)},
                    {"mixing", mixing_name(a.mixing)},
                    {"method", method_name(a.method)},
                    {"T", a.length},
                    {"mean_mdi", number(a.mean_mdi)},
                    {"se_mdi", number(a.se_mdi)},
                    {"n_ok", a.n_ok},
                    {"n_failed", a.n_failed}});
  }
  doc["aggregates"] = std::move(aggs);
  os << doc.dump(2) << '\n';
}

void write_summary_csv(std::ostream& os, const RunManifest& manifest) {
  os << "setting,mixing,method,T,mean_mdi,se_mdi,n_ok\n";
  const auto old_flags = os.flags();
  const auto old_precision = os.precision();
  os << std::setprecision(17);
  for (const Aggregate& a : manifest.aggregates) {
    os << setting_name(a.setting) << ',' << mixing_name(a.mixing) << ',' << method_name(a.method) << ',' << a.length
       << ',' << a.mean_mdi << ',' << a.se_mdi << ',' << a.n_ok << '\n';
  }
  os.flags(old_flags);
  os.precision(old_precision);
}

}  // namespace tbss
