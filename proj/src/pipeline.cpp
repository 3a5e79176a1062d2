#include "pfclust/pipeline.hpp"

#include <chrono>
#include <fmt/format.h>

#include "pfclust/detect.hpp"
#include "pfclust/errors.hpp"

namespace pfclust {
namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point since) {
  return std::chrono::duration<double, std::milli>(Clock::now() - since).count();
}

}  // namespace

std::string_view to_string(Degeneracy d) {
  switch (d) {
    case Degeneracy::kIdenticalPoints:
      return "identical_points";
    case Degeneracy::kAllOutliers:
      return "all_outliers";
    case Degeneracy::kNone:
      break;
  }
  return "none";
}

std::string_view to_string(EntryStatus s) {
  switch (s) {
    case EntryStatus::kSkipped:
      return "skipped";
    case EntryStatus::kError:
      return "error";
    case EntryStatus::kOk:
      break;
  }
  return "ok";
}

RunResult run_pipeline(const Dataset& data, const PipelineOptions& options) {
  validate(data);
  if (options.bins < 2) throw ContractViolation(fmt::format("bins must be >= 2, got {}", options.bins));

  RunResult result;
  result.n = data.size();
  result.dimension = data.dimension();
  result.bins = options.bins;

  auto start = Clock::now();
  const NormalizedData norm = normalize(data);
  result.timings.normalize_ms = elapsed_ms(start);

  start = Clock::now();
  {
    const DistanceMatrix dm = distance_matrix(norm);
    result.sigma = dm.sigma;
    if (dm.sigma > 0.0) {
      const AffinityModel model = build_affinity_model(dm, options.bins);
      result.histogram = model.histogram;
      result.selected_bin = model.selected_bin;
      result.threshold = model.threshold;
    }
  }  // both n x n matrices are released here
  result.timings.matrices_ms = elapsed_ms(start);

  start = Clock::now();
  const Clustering detected = find_clusters(norm.z, result.sigma, result.threshold);
  const Clustering clustering =
      result.sigma > 0.0 ? extract_outliers(detected) : detected;
  result.timings.detect_ms = elapsed_ms(start);
  result.detected_count = detected.cluster_count();
  result.initial_count = clustering.cluster_count();
  result.outlier_count = clustering.outliers.size();
  if (!(result.sigma > 0.0)) result.degeneracy = Degeneracy::kIdenticalPoints;

  start = Clock::now();
  if (clustering.cluster_count() == 0) {
    result.degeneracy = Degeneracy::kAllOutliers;
    result.assignment = clustering.assignment;
  } else {
    const MergePlan plan = plan_merge(norm.z, clustering);
    result.k_estimate = plan.k_estimate;
    result.k_defaulted = plan.k_defaulted;
    result.accepted = plan.accepted;
    result.cost_before = plan.cost_before;
    result.cost_after = plan.cost_after;
    result.merge_steps = plan.steps;
    result.raw_final_count = plan.final_count();
    result.assignment = plan.final_assignment;
  }
  result.final_count = report_cluster_count(result.raw_final_count, result.n);
  result.timings.merge_ms = elapsed_ms(start);
  return result;
}

CorpusReport run_bench(const CorpusManifest& manifest, int bins, OutlierPolicy policy) {
  const auto start = Clock::now();
  CorpusReport report;
  report.bins = bins;
  report.policy = policy;
  for (const ManifestEntry& spec : manifest.entries) {
    BenchEntry entry;
    entry.name = spec.name;
    entry.truth_k = spec.truth_k;
    if (!spec.available) {
      entry.status = EntryStatus::kSkipped;
      entry.message = fmt::format("file not found: {}", spec.path.string());
      report.entries.push_back(std::move(entry));
      continue;
    }
    ++report.evaluated;
    try {
      Dataset data = load_dataset(spec.path, spec.load);
      data.name = spec.name;
      RunResult run = run_pipeline(data, PipelineOptions{bins});
      entry.has_labels = data.labels.has_value();
      if (entry.has_labels) {
        entry.eval = evaluate(run.assignment, *data.labels, run.final_count, spec.truth_k, policy);
      } else {
        EvalReport counts_only;
        counts_only.predicted_k = run.final_count;
        counts_only.truth_k = spec.truth_k;
        counts_only.exact_match = run.final_count && *run.final_count == spec.truth_k;
        entry.eval = counts_only;
      }
      if (entry.eval->exact_match) ++report.matches;
      entry.run = std::move(run);
    } catch (const std::exception& e) {
      entry.status = EntryStatus::kError;
      entry.message = e.what();
    }
    report.entries.push_back(std::move(entry));
  }
  if (report.evaluated > 0) report.accuracy = corpus_accuracy(report.matches, report.evaluated);
  report.wall_ms = elapsed_ms(start);
  return report;
}

SweepResult sweep_bins(const CorpusManifest& manifest, const std::vector<int>& bin_counts) {
  SweepResult result;
  std::vector<std::optional<Dataset>> loaded;
  std::vector<std::string> load_errors(manifest.entries.size());
  for (std::size_t i = 0; i < manifest.entries.size(); ++i) {
    const auto& spec = manifest.entries[i];
    loaded.emplace_back();
    if (!spec.available) continue;
    try {
      loaded.back() = load_dataset(spec.path, spec.load);
    } catch (const std::exception& e) {
      load_errors[i] = e.what();
    }
  }

  for (int bins : bin_counts) {
    std::size_t evaluated = 0;
    std::size_t matches = 0;
    for (std::size_t i = 0; i < manifest.entries.size(); ++i) {
      const auto& spec = manifest.entries[i];
      SweepRow row;
      row.dataset = spec.name;
      row.bins = bins;
      row.truth_k = spec.truth_k;
      if (!spec.available) {
        row.status = EntryStatus::kSkipped;
        result.rows.push_back(row);
        continue;
      }
      ++evaluated;
      if (!loaded[i]) {
        row.status = EntryStatus::kError;
        result.rows.push_back(row);
        continue;
      }
      try {
        const RunResult run = run_pipeline(*loaded[i], PipelineOptions{bins});
        row.predicted_k = run.final_count;
        row.exact_match = run.final_count && *run.final_count == spec.truth_k;
      } catch (const std::exception&) {
        row.status = EntryStatus::kError;
      }
      if (row.exact_match) ++matches;
      result.rows.push_back(row);
    }
    SweepPoint point{bins, std::nullopt};
    if (evaluated > 0) point.accuracy = corpus_accuracy(matches, evaluated);
    result.curve.push_back(point);
  }
  return result;
}

}  // namespace pfclust
