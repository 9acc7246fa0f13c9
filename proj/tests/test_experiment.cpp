#include "tbss/experiment.hpp"

#include <gtest/gtest.h>
#include <json.hpp>

#include <sstream>

using namespace tbss;

namespace {

ExperimentSpec small_spec() {
  ExperimentSpec spec;
  spec.settings = {Setting::arma, Setting::sv};
  spec.mixings = {MixingKind::haar};
  spec.lengths = {200};
  spec.methods = {Method::tsobi, Method::sobi, Method::tjade};
  spec.sobi_lags = LagSet::range(1, 3);
  spec.replicates = 3;
  spec.seed = 42;
  return spec;
}

}  // namespace

TEST(ExperimentSpec, ParseConfig) {
  std::istringstream is(R"(# desk run
setting = arma, sv
mixing  = gaussian,haar
dims    = 3,2,2
T       = 1000, 2000   # two lengths
methods = tsobi, TGJADE
lags.sobi = 1,2,5
lags.gjade = 0:3
reps = 7
seed = 99
out = results
threads = 2
)");
  const ExperimentSpec spec = parse_experiment(is);
  EXPECT_EQ(spec.settings.size(), 2u);
  EXPECT_EQ(spec.mixings.back(), MixingKind::haar);
  EXPECT_EQ(spec.lengths, (std::vector<Index>{1000, 2000}));
  EXPECT_EQ(spec.methods, (std::vector<Method>{Method::tsobi, Method::tgjade}));
  EXPECT_EQ(spec.sobi_lags.lags(), (std::vector<int>{1, 2, 5}));
  EXPECT_EQ(spec.gjade_lags, LagSet::range(0, 3));
  EXPECT_EQ(spec.replicates, 7);
  EXPECT_EQ(spec.seed, 99u);
  EXPECT_EQ(spec.out, "results");
  EXPECT_EQ(spec.threads, 2);

  std::istringstream again(format_experiment(spec));
  const ExperimentSpec round = parse_experiment(again);
  EXPECT_EQ(format_experiment(round), format_experiment(spec));
}

TEST(ExperimentSpec, ErrorsNameTheField) {
  auto error_for = [](const std::string& text) -> std::string {
    std::istringstream is(text);
    try {
      parse_experiment(is);
    } catch (const SpecError& e) {
      return e.what();
    }
    return "";
  };
  EXPECT_NE(error_for("reps = 0\n").find("reps"), std::string::npos);
  EXPECT_NE(error_for("reps = many\n").find("reps"), std::string::npos);
  EXPECT_NE(error_for("T = 20\n").find("T"), std::string::npos);
  EXPECT_NE(error_for("dims = 3,3\n").find("dims"), std::string::npos);
  EXPECT_NE(error_for("setting = garch\n").find("setting"), std::string::npos);
  EXPECT_NE(error_for("methods = pca\n").find("methods"), std::string::npos);
  EXPECT_NE(error_for("lags.sobi = 3:1\n").find("lags.sobi"), std::string::npos);
  EXPECT_NE(error_for("colour = red\n").find("colour"), std::string::npos);
  EXPECT_NE(error_for("just words\n").find("line 1"), std::string::npos);
}

TEST(ExperimentSpec, LengthBoundUsesLargestLag) {
  ExperimentSpec spec;
  spec.methods = {Method::tfobi};
  spec.lengths = {2};
  EXPECT_NO_THROW(spec.validate());
  spec.methods = {Method::tsobi};
  spec.lengths = {25};
  EXPECT_THROW(spec.validate(), SpecError);
  spec.lengths = {26};
  EXPECT_NO_THROW(spec.validate());
}

TEST(ExperimentSpec, LagsForMethod) {
  const ExperimentSpec spec = small_spec();
  EXPECT_EQ(spec.lags_for(Method::tsobi), LagSet::range(1, 3));
  EXPECT_EQ(spec.lags_for(Method::gfobi), LagSet::range(0, 12));
  EXPECT_FALSE(spec.lags_for(Method::tjade).has_value());
  EXPECT_FALSE(spec.lags_for(Method::fobi).has_value());
}

TEST(Bench, DeterministicAcrossThreadCounts) {
  ExperimentSpec spec = small_spec();
  spec.threads = 1;
  const RunManifest a = run_bench(spec);
  spec.threads = 3;
  const RunManifest b = run_bench(spec);
  ASSERT_EQ(a.records.size(), 2u * 3u * 3u);
  ASSERT_EQ(a.records.size(), b.records.size());
  for (std::size_t k = 0; k < a.records.size(); ++k) {
    EXPECT_EQ(a.records[k].mdi, b.records[k].mdi);
    EXPECT_TRUE(a.records[k].ok) << a.records[k].error;
    EXPECT_GE(a.records[k].mdi, 0.0);
    EXPECT_LE(a.records[k].mdi, 1.0);
  }
  for (std::size_t k = 0; k < a.aggregates.size(); ++k) EXPECT_EQ(a.aggregates[k].mean_mdi, b.aggregates[k].mean_mdi);
}

TEST(Bench, AggregatesMatchRecords) {
  const RunManifest m = run_bench(small_spec());
  ASSERT_EQ(m.aggregates.size(), 2u * 3u);
  const Aggregate& agg = m.aggregate(Setting::sv, MixingKind::haar, Method::tjade, 200);
  double sum = 0.0;
  int n = 0;
  for (const ReplicateRecord& r : m.records) {
    if (r.setting == Setting::sv && r.method == Method::tjade) {
      sum += r.mdi;
      ++n;
    }
  }
  EXPECT_EQ(n, 3);
  EXPECT_NEAR(agg.mean_mdi, sum / n, 1e-15);
  EXPECT_EQ(agg.n_ok, 3);
  EXPECT_EQ(agg.n_failed, 0);
  EXPECT_THROW(m.aggregate(Setting::sv, MixingKind::gaussian, Method::tjade, 200), std::out_of_range);
}

TEST(Bench, ReplicateStreamsAreDistinct) {
  Rng a = replicate_rng(1, 0, Setting::arma, MixingKind::haar, 100);
  Rng b = replicate_rng(1, 1, Setting::arma, MixingKind::haar, 100);
  Rng c = replicate_rng(1, 0, Setting::sv, MixingKind::haar, 100);
  Rng d = replicate_rng(1, 0, Setting::arma, MixingKind::haar, 100);
  const auto x = a();
  EXPECT_NE(x, b());
  EXPECT_NE(x, c());
  EXPECT_EQ(x, d());
}

TEST(Bench, OutputFormats) {
  ExperimentSpec spec = small_spec();
  spec.settings = {Setting::arma};
  spec.replicates = 2;
  const RunManifest m = run_bench(spec);

  std::ostringstream csv;
  write_summary_csv(csv, m);
  std::istringstream lines(csv.str());
  std::string header;
  std::getline(lines, header);
  EXPECT_EQ(header, "setting,mixing,method,T,mean_mdi,se_mdi,n_ok");
  int rows = 0;
  for (std::string line; std::getline(lines, line);) {
    EXPECT_EQ(line.rfind("arma,haar,", 0), 0u) << line;
    ++rows;
  }
  EXPECT_EQ(rows, 3);

  std::ostringstream js;
  write_manifest_json(js, m);
  const auto doc = nlohmann::json::parse(js.str());
  EXPECT_EQ(doc["version"], kVersion);
  EXPECT_EQ(doc["seed"], 42);
  EXPECT_EQ(doc["replicates"].size(), 6u);
  EXPECT_EQ(doc["aggregates"].size(), 3u);
  EXPECT_EQ(doc["spec"]["lags"]["sobi"], (std::vector<int>{1, 2, 3}));
  for (const auto& r : doc["replicates"]) {
    EXPECT_GE(r["mdi"].get<double>(), 0.0);
    EXPECT_LE(r["mdi"].get<double>(), 1.0);
  }
}
