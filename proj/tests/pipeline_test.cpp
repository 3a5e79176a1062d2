#include <gtest/gtest.h>

#include <json.hpp>
#include <limits>
#include <set>
#include <sstream>

#include "pfclust/data.hpp"
#include "pfclust/errors.hpp"
#include "pfclust/pipeline.hpp"
#include "pfclust/report.hpp"
#include "support.hpp"

using namespace pfclust;
using json = nlohmann::json;

namespace {

// Two 5x5 grids a long way apart.
Dataset two_far_grids() {
  Matrix m(50, 2);
  for (std::size_t i = 0; i < 50; ++i) {
    const double base = i < 25 ? 0.0 : 100.0;
    m(i, 0) = base + 0.1 * static_cast<double>(i % 5);
    m(i, 1) = base + 0.1 * static_cast<double>((i % 25) / 5);
  }
  return testing_support::make_dataset(std::move(m), "grids");
}

SyntheticSpec separated_pair(std::uint64_t seed) {
  SyntheticSpec s;
  s.name = "pair" + std::to_string(seed);
  s.cluster_count = 2;
  s.points_per_cluster = {50, 50};
  s.spread_per_cluster = {1.0, 1.0};
  s.dimension = 8;
  s.center_separation = 10.0;
  s.seed = seed;
  return s;
}

SyntheticSpec varied_blobs(std::uint64_t seed, double separation) {
  SyntheticSpec s;
  s.name = "blobs" + std::to_string(seed);
  s.cluster_count = 2 + seed % 4;
  s.points_per_cluster.clear();
  s.spread_per_cluster.clear();
  for (std::size_t c = 0; c < s.cluster_count; ++c) {
    s.points_per_cluster.push_back(30 + 10 * ((seed + c) % 3));
    s.spread_per_cluster.push_back(1.0);
  }
  s.dimension = 8;
  s.center_separation = separation;
  s.seed = seed;
  return s;
}

struct Corpus {
  std::filesystem::path dir;
  std::filesystem::path manifest;
  std::vector<std::size_t> truth;
};

Corpus write_corpus(const std::string& tag, const std::vector<SyntheticSpec>& specs,
                    const std::string& extra = {}) {
  Corpus c;
  c.dir = testing_support::scratch_dir(tag);
  std::string text;
  for (const auto& s : specs) {
    std::ostringstream out;
    write_dataset(generate_synthetic(s), out);
    testing_support::write_file(c.dir / (s.name + ".csv"), out.str());
    text += "[" + s.name + "]\npath = " + s.name + ".csv\ntruth_k = " +
            std::to_string(s.cluster_count) + "\nlabel_col = " + std::to_string(s.dimension + 1) +
            "\nnoise_label = 0\n";
    c.truth.push_back(s.cluster_count);
  }
  text += extra;
  c.manifest = c.dir / "corpus.ini";
  testing_support::write_file(c.manifest, text);
  return c;
}

}  // namespace

TEST(Pipeline, TwoFarGridsGiveTwoClustersNoOutliers) {
  const auto run = run_pipeline(two_far_grids());
  ASSERT_EQ(run.final_count, std::optional<std::size_t>(2));
  EXPECT_EQ(run.outlier_count, 0u);
  EXPECT_EQ(run.degeneracy, Degeneracy::kNone);
  for (std::size_t i = 0; i < 50; ++i) EXPECT_EQ(run.assignment[i], i < 25 ? 1 : 2);
}

TEST(Pipeline, SeparatedPairsRecoveredOnFiftySeeds) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto data = generate_synthetic(separated_pair(seed));
    const auto run = run_pipeline(data);
    const auto eval = evaluate(run.assignment, *data.labels, run.final_count, 2);
    EXPECT_TRUE(eval.exact_match) << "seed " << seed;
    EXPECT_NEAR(eval.ari, 1.0, 1e-12) << "seed " << seed;
  }
}

TEST(Pipeline, IdenticalPointsAreDegenerate) {
  const auto run = run_pipeline(testing_support::make_dataset(Matrix(6, 3, 2.5)));
  EXPECT_EQ(run.degeneracy, Degeneracy::kIdenticalPoints);
  EXPECT_EQ(run.final_count, std::optional<std::size_t>(1));
  EXPECT_EQ(run.assignment, std::vector<int>(6, 1));
}

TEST(Pipeline, ResultFieldsAreConsistent) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    auto spec = varied_blobs(seed, 8.0);
    spec.noise_fraction = 0.1;
    const auto data = generate_synthetic(spec);
    const auto run = run_pipeline(data);
    std::uint64_t total = 0;
    for (auto h : run.histogram) total += h;
    ASSERT_EQ(total, data.size() * data.size());
    std::size_t zeros = 0;
    std::set<int> ids;
    for (int a : run.assignment) {
      if (a == 0) {
        ++zeros;
      } else {
        ids.insert(a);
      }
    }
    ASSERT_EQ(zeros, run.outlier_count);
    ASSERT_EQ(ids.size(), run.raw_final_count);
    ASSERT_EQ(run.raw_final_count, run.accepted ? run.k_estimate : run.initial_count);
    ASSERT_EQ(run.merge_steps.size(), run.initial_count - run.k_estimate);
    ASSERT_EQ(run.accepted, *run.cost_after <= *run.cost_before);
    ASSERT_EQ(run.detected_count, run.initial_count + run.outlier_count);
  }
}

TEST(Pipeline, RejectsTooSmallInput) {
  EXPECT_THROW(run_pipeline(testing_support::make_dataset(Matrix(1, 2, 0.0))),
               ContractViolation);
}

TEST(Bench, FiveSeparatedDatasetsAllMatch) {
  std::vector<SyntheticSpec> specs;
  for (std::uint64_t s = 0; s < 5; ++s) specs.push_back(varied_blobs(100 + s, 10.0));
  const auto corpus = write_corpus("bench5", specs);
  const auto report = run_bench(load_manifest(corpus.manifest), 10, OutlierPolicy::kSingletons);
  EXPECT_EQ(report.evaluated, 5u);
  EXPECT_EQ(report.matches, 5u);
  EXPECT_EQ(report.accuracy, std::optional<double>(100.0));
  const auto sweep = sweep_bins(load_manifest(corpus.manifest), {10});
  ASSERT_EQ(sweep.curve.size(), 1u);
  EXPECT_EQ(sweep.curve[0].accuracy, std::optional<double>(100.0));
  std::filesystem::remove_all(corpus.dir);
}

TEST(Bench, AccuracyEqualsHandCount) {
  std::vector<SyntheticSpec> specs;
  for (std::uint64_t s = 0; s < 10; ++s) {
    auto spec = varied_blobs(200 + s, 4.0 + static_cast<double>(s));
    spec.noise_fraction = 0.1;
    specs.push_back(spec);
  }
  const auto corpus = write_corpus("bench10", specs);
  const auto report = run_bench(load_manifest(corpus.manifest), 10, OutlierPolicy::kSingletons);
  std::size_t hand = 0;
  for (std::size_t i = 0; i < specs.size(); ++i) {
    const auto data = generate_synthetic(specs[i]);
    const auto run = run_pipeline(data);
    hand += run.final_count == std::optional<std::size_t>(corpus.truth[i]);
    ASSERT_EQ(report.entries[i].run->final_count, run.final_count);
  }
  EXPECT_EQ(report.matches, hand);
  EXPECT_NEAR(*report.accuracy, 100.0 * static_cast<double>(hand) / 10.0, 1e-12);
  std::filesystem::remove_all(corpus.dir);
}

TEST(Bench, MissingFilesSkipAndBrokenFilesCountAsMisses) {
  const auto corpus = write_corpus(
      "benchmix", {varied_blobs(300, 10.0)},
      "[gone]\npath = nowhere.csv\ntruth_k = 3\n[broken]\npath = broken.csv\ntruth_k = 2\n");
  testing_support::write_file(corpus.dir / "broken.csv", "1,2\n3\n");
  const auto report = run_bench(load_manifest(corpus.manifest), 10, OutlierPolicy::kSingletons);
  ASSERT_EQ(report.entries.size(), 3u);
  EXPECT_EQ(report.entries[1].status, EntryStatus::kSkipped);
  EXPECT_EQ(report.entries[2].status, EntryStatus::kError);
  EXPECT_FALSE(report.entries[2].message.empty());
  EXPECT_EQ(report.evaluated, 2u);
  EXPECT_EQ(report.matches, 1u);
  EXPECT_EQ(report.accuracy, std::optional<double>(50.0));
  std::filesystem::remove_all(corpus.dir);
}

TEST(Sweep, SingleDatasetSingleBinCount) {
  const auto corpus = write_corpus("sweep1", {varied_blobs(400, 10.0)});
  const auto sweep = sweep_bins(load_manifest(corpus.manifest), {10});
  ASSERT_EQ(sweep.rows.size(), 1u);
  EXPECT_EQ(sweep.rows[0].bins, 10);
  const auto wide = sweep_bins(load_manifest(corpus.manifest), {5, 10, 20});
  EXPECT_EQ(wide.rows.size(), 3u);
  EXPECT_EQ(wide.curve.size(), 3u);
  std::filesystem::remove_all(corpus.dir);
}

TEST(Report, ClusterJsonCarriesRunSummary) {
  const auto run = run_pipeline(two_far_grids());
  const auto doc = json::parse(cluster_json("grids", run, false));
  EXPECT_EQ(doc["schema_version"], kSchemaVersion);
  EXPECT_EQ(doc["command"], "cluster");
  EXPECT_EQ(doc["dataset"], "grids");
  EXPECT_EQ(doc["n"], 50);
  EXPECT_EQ(doc["final_cluster_count"], 2);
  EXPECT_EQ(doc["outlier_count"], 0);
  EXPECT_EQ(doc["assignment"].size(), 50u);
  EXPECT_EQ(doc["assignment"][30], 2);
  EXPECT_FALSE(doc.contains("timings_ms"));
  EXPECT_NEAR(doc["threshold"].get<double>(), run.threshold, 5e-7);
  const auto timed = json::parse(cluster_json("grids", run, true));
  EXPECT_TRUE(timed["timings_ms"].contains("total"));
}

TEST(Report, NaCountIsAString) {
  RunResult run;
  run.final_count = std::nullopt;
  const auto doc = json::parse(cluster_json("x", run, false));
  EXPECT_EQ(doc["final_cluster_count"], "na");
}

TEST(Report, HistogramOutputsAgree) {
  const auto run = run_pipeline(two_far_grids());
  const auto doc = json::parse(histogram_json("grids", run));
  EXPECT_EQ(doc["counts"].get<std::vector<std::uint64_t>>(), run.histogram);
  EXPECT_EQ(doc["selected_bin"], run.selected_bin);
  std::istringstream csv(histogram_csv(run));
  std::string line;
  std::getline(csv, line);
  EXPECT_EQ(line.rfind("# schema_version=1", 0), 0u);
  std::getline(csv, line);
  EXPECT_EQ(line, "bin,lower,upper,count,selected");
  std::size_t rows = 0;
  while (std::getline(csv, line)) ++rows;
  EXPECT_EQ(rows, static_cast<std::size_t>(run.bins));
}

TEST(Report, EvaluateJsonAndCsv) {
  const auto data = two_far_grids();
  const auto run = run_pipeline(data);
  std::vector<int> truth(50);
  for (std::size_t i = 0; i < 50; ++i) truth[i] = i < 25 ? 1 : 2;
  const auto eval = evaluate(run.assignment, truth, run.final_count, 2);
  const auto doc = json::parse(evaluate_json("grids", run, eval, OutlierPolicy::kExclude));
  EXPECT_EQ(doc["outlier_policy"], "exclude");
  EXPECT_DOUBLE_EQ(doc["ari"].get<double>(), 1.0);
  EXPECT_EQ(doc["exact_match"], true);
  const auto csv = evaluate_csv("grids", eval);
  EXPECT_NE(csv.find("grids,1.000000,1.000000,1.000000,2,2,1"), std::string::npos) << csv;
}

TEST(Report, JsonWriterEscapesAndNulls) {
  JsonWriter w;
  w.begin_object();
  w.key("s").value("a\"b\\c\n");
  w.key("nan").value(std::numeric_limits<double>::quiet_NaN());
  w.key("list").begin_array().value(1).value(2.5).null().end_array();
  w.key("empty").begin_object().end_object();
  w.end_object();
  const auto doc = json::parse(w.str());
  EXPECT_EQ(doc["s"], "a\"b\\c\n");
  EXPECT_TRUE(doc["nan"].is_null());
  EXPECT_EQ(doc["list"][1], 2.5);
  EXPECT_TRUE(doc["empty"].empty());
  EXPECT_EQ(format_real(1.0 / 3.0), "0.333333");
}

TEST(Report, BenchJsonIsDeterministicWithoutTimings) {
  const auto corpus = write_corpus("benchjson", {varied_blobs(500, 10.0)});
  const auto manifest = load_manifest(corpus.manifest);
  const auto a = bench_json(run_bench(manifest, 10, OutlierPolicy::kSingletons), false);
  const auto b = bench_json(run_bench(manifest, 10, OutlierPolicy::kSingletons), false);
  EXPECT_EQ(a, b);
  const auto doc = json::parse(a);
  EXPECT_FALSE(doc.contains("wall_ms"));
  EXPECT_EQ(doc["matches"], 1);
  EXPECT_EQ(doc["datasets"][0]["name"], "blobs500");
  const auto csv = bench_csv(run_bench(manifest, 10, OutlierPolicy::kSingletons));
  EXPECT_NE(csv.find("blobs500"), std::string::npos);
  std::filesystem::remove_all(corpus.dir);
}
