#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "pfclust/data.hpp"
#include "pfclust/evaluate.hpp"
#include "pfclust/merge.hpp"
#include "pfclust/preprocess.hpp"

namespace pfclust {

struct StageTimings {
  double normalize_ms = 0.0;
  double matrices_ms = 0.0;
  double detect_ms = 0.0;
  double merge_ms = 0.0;

  double total_ms() const noexcept { return normalize_ms + matrices_ms + detect_ms + merge_ms; }
};

enum class Degeneracy {
  kNone,
  kIdenticalPoints,  // zero distance dispersion; one cluster holds everything
  kAllOutliers,      // every detected cluster was a singleton
};

std::string_view to_string(Degeneracy d);

struct RunResult {
  std::size_t n = 0;
  std::size_t dimension = 0;
  int bins = kDefaultBins;
  double sigma = 0.0;
  std::vector<std::uint64_t> histogram;
  int selected_bin = 0;
  double threshold = 0.0;

  std::size_t detected_count = 0;  // clusters before singleton removal
  std::size_t initial_count = 0;   // p, after singleton removal
  std::size_t outlier_count = 0;
  std::size_t k_estimate = 0;
  bool k_defaulted = false;
  bool accepted = true;
  std::size_t raw_final_count = 0;
  std::optional<std::size_t> final_count;  // nullopt is "na"
  std::optional<double> cost_before;       // absent when p == 0
  std::optional<double> cost_after;
  std::vector<MergeStep> merge_steps;

  std::vector<int> assignment;  // 1-based ids, 0 for outliers
  Degeneracy degeneracy = Degeneracy::kNone;
  StageTimings timings;
};

struct PipelineOptions {
  int bins = kDefaultBins;
};

/// normalize -> distances -> affinities -> histogram/threshold -> detection ->
/// outlier removal -> count estimate -> merge -> "na" rule.
RunResult run_pipeline(const Dataset& data, const PipelineOptions& options = {});

enum class EntryStatus { kOk, kSkipped, kError };
std::string_view to_string(EntryStatus s);

struct BenchEntry {
  std::string name;
  EntryStatus status = EntryStatus::kOk;
  std::string message;
  std::size_t truth_k = 0;
  std::optional<RunResult> run;
  // Present whenever the dataset ran; pair indices only when labels exist.
  std::optional<EvalReport> eval;
  bool has_labels = false;
};

struct CorpusReport {
  int bins = kDefaultBins;
  OutlierPolicy policy = OutlierPolicy::kSingletons;
  std::vector<BenchEntry> entries;
  std::size_t evaluated = 0;  // entries not skipped
  std::size_t matches = 0;
  std::optional<double> accuracy;  // percent; absent when nothing was evaluated
  double wall_ms = 0.0;
};

/// Runs every manifest entry. Missing files become skipped rows; load or
/// pipeline failures become error rows that count as mismatches.
CorpusReport run_bench(const CorpusManifest& manifest, int bins, OutlierPolicy policy);

struct SweepRow {
  std::string dataset;
  int bins = 0;
  EntryStatus status = EntryStatus::kOk;
  std::optional<std::size_t> predicted_k;
  std::size_t truth_k = 0;
  bool exact_match = false;
};

struct SweepPoint {
  int bins = 0;
  std::optional<double> accuracy;
};

struct SweepResult {
  std::vector<SweepRow> rows;
  std::vector<SweepPoint> curve;
};

/// Reruns the pipeline for each bin count on every available dataset.
SweepResult sweep_bins(const CorpusManifest& manifest, const std::vector<int>& bin_counts);

}  // namespace pfclust
