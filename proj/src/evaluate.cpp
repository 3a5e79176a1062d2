#include "pfclust/evaluate.hpp"

#include <algorithm>
#include <fmt/format.h>
#include <map>
#include <set>
#include <utility>

#include "pfclust/errors.hpp"

namespace pfclust {
namespace {

std::uint64_t choose2(std::uint64_t m) { return m * (m - (m > 0 ? 1 : 0)) / 2; }

// Dense ids for one partition; 0 becomes a fresh singleton per point.
std::vector<std::size_t> densify(const std::vector<int>& ids, std::size_t& count) {
  std::map<int, std::size_t> seen;
  std::vector<std::size_t> out(ids.size());
  count = 0;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (ids[i] == 0) {
      out[i] = count++;
      continue;
    }
    auto [it, fresh] = seen.try_emplace(ids[i], count);
    if (fresh) ++count;
    out[i] = it->second;
  }
  return out;
}

}  // namespace

OutlierPolicy parse_outlier_policy(std::string_view text) {
  if (text == "singletons") return OutlierPolicy::kSingletons;
  if (text == "exclude") return OutlierPolicy::kExclude;
  throw IngestError(fmt::format("unknown outlier policy '{}'", text));
}

std::string_view to_string(OutlierPolicy policy) {
  return policy == OutlierPolicy::kExclude ? "exclude" : "singletons";
}

Contingency contingency(std::span<const int> predicted, std::span<const int> truth,
                        OutlierPolicy policy) {
  if (predicted.size() != truth.size()) {
    throw ContractViolation(fmt::format("partition lengths differ: {} vs {}", predicted.size(),
                                        truth.size()));
  }
  std::vector<int> pred;
  std::vector<int> tru;
  pred.reserve(predicted.size());
  tru.reserve(truth.size());
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    if (policy == OutlierPolicy::kExclude && predicted[i] == 0) continue;
    pred.push_back(predicted[i]);
    tru.push_back(truth[i]);
  }

  std::size_t rows = 0;
  std::size_t cols = 0;
  const auto r = densify(pred, rows);
  const auto c = densify(tru, cols);
  Contingency out;
  out.evaluated = pred.size();
  out.row_sums.assign(rows, 0);
  out.col_sums.assign(cols, 0);
  std::map<std::pair<std::size_t, std::size_t>, std::uint64_t> cells;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    ++out.row_sums[r[i]];
    ++out.col_sums[c[i]];
    ++cells[{r[i], c[i]}];
  }
  out.cells.reserve(cells.size());
  for (const auto& [key, count] : cells) out.cells.push_back(count);
  return out;
}

PairCountTable pair_counts(const Contingency& table) {
  std::uint64_t together_both = 0;
  for (auto v : table.cells) together_both += choose2(v);
  std::uint64_t together_pred = 0;
  for (auto v : table.row_sums) together_pred += choose2(v);
  std::uint64_t together_truth = 0;
  for (auto v : table.col_sums) together_truth += choose2(v);
  const std::uint64_t total = choose2(table.evaluated);

  PairCountTable out;
  out.tp = together_both;
  out.fp = together_pred - together_both;
  out.fn = together_truth - together_both;
  out.tn = total - out.tp - out.fp - out.fn;
  return out;
}

PairCountTable pair_counts(std::span<const int> predicted, std::span<const int> truth,
                           OutlierPolicy policy) {
  return pair_counts(contingency(predicted, truth, policy));
}

double adjusted_rand_index(const Contingency& table) {
  const PairCountTable pairs = pair_counts(table);
  const double index = static_cast<double>(pairs.tp);
  const double sum_rows = static_cast<double>(pairs.tp + pairs.fp);
  const double sum_cols = static_cast<double>(pairs.tp + pairs.fn);
  const double total = static_cast<double>(pairs.total());
  const double expected = total > 0 ? sum_rows * sum_cols / total : 0.0;
  const double max_index = 0.5 * (sum_rows + sum_cols);
  const double denom = max_index - expected;
  if (denom == 0.0) return pairs.fp == 0 && pairs.fn == 0 ? 1.0 : 0.0;
  return (index - expected) / denom;
}

double jaccard_index(const PairCountTable& table) {
  const std::uint64_t denom = table.tp + table.fp + table.fn;
  // No co-clustered pair anywhere means both partitions are all singletons.
  if (denom == 0) return 1.0;
  return static_cast<double>(table.tp) / static_cast<double>(denom);
}

double pairwise_f1(const PairCountTable& table) {
  if (table.tp + table.fp + table.fn == 0) return 1.0;
  if (table.tp == 0) return 0.0;
  const double precision = static_cast<double>(table.tp) / static_cast<double>(table.tp + table.fp);
  const double recall = static_cast<double>(table.tp) / static_cast<double>(table.tp + table.fn);
  return 2.0 * precision * recall / (precision + recall);
}

std::size_t count_clusters(std::span<const int> labels) {
  std::set<int> ids;
  for (int v : labels) {
    if (v != 0) ids.insert(v);
  }
  return ids.size();
}

EvalReport evaluate(std::span<const int> predicted, std::span<const int> truth,
                    std::optional<std::size_t> predicted_k, std::size_t truth_k,
                    OutlierPolicy policy) {
  const Contingency table = contingency(predicted, truth, policy);
  const PairCountTable pairs = pair_counts(table);
  EvalReport report;
  report.ari = adjusted_rand_index(table);
  report.jaccard = jaccard_index(pairs);
  report.f1 = pairwise_f1(pairs);
  report.predicted_k = predicted_k;
  report.truth_k = truth_k;
  report.exact_match = predicted_k.has_value() && *predicted_k == truth_k;
  return report;
}

double corpus_accuracy(std::size_t matches, std::size_t total) {
  if (total == 0) throw ContractViolation("accuracy over an empty corpus");
  if (matches > total) throw ContractViolation("more matches than datasets");
  return 100.0 * static_cast<double>(matches) / static_cast<double>(total);
}

double corpus_accuracy(std::span<const EvalReport> reports) {
  const auto hits = std::count_if(reports.begin(), reports.end(),
                                  [](const EvalReport& r) { return r.exact_match; });
  return corpus_accuracy(static_cast<std::size_t>(hits), reports.size());
}

}  // namespace pfclust
