#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace pfclust {

// How predicted outliers (id 0) enter pair counting. Ground-truth noise
// (label 0) is always scored as singletons.
enum class OutlierPolicy { kSingletons, kExclude };

OutlierPolicy parse_outlier_policy(std::string_view text);
std::string_view to_string(OutlierPolicy policy);

struct PairCountTable {
  std::uint64_t tp = 0;  // together in both
  std::uint64_t fp = 0;  // together in predicted only
  std::uint64_t fn = 0;  // together in truth only
  std::uint64_t tn = 0;  // apart in both

  std::uint64_t total() const noexcept { return tp + fp + fn + tn; }
  bool operator==(const PairCountTable&) const = default;
};

// Cross-tabulation of two partitions over the evaluated points.
struct Contingency {
  std::size_t evaluated = 0;
  std::vector<std::uint64_t> row_sums;  // predicted cluster sizes
  std::vector<std::uint64_t> col_sums;  // truth cluster sizes
  std::vector<std::uint64_t> cells;     // nonzero n_ij only
};

Contingency contingency(std::span<const int> predicted, std::span<const int> truth,
                        OutlierPolicy policy = OutlierPolicy::kSingletons);

PairCountTable pair_counts(const Contingency& table);
PairCountTable pair_counts(std::span<const int> predicted, std::span<const int> truth,
                           OutlierPolicy policy = OutlierPolicy::kSingletons);

// Permutation-model adjusted Rand index. When the adjustment denominator is
// zero the result is 1 for identical partitions and 0 otherwise.
double adjusted_rand_index(const Contingency& table);
double jaccard_index(const PairCountTable& table);
double pairwise_f1(const PairCountTable& table);

struct EvalReport {
  double ari = 0.0;
  double jaccard = 0.0;
  double f1 = 0.0;
  std::optional<std::size_t> predicted_k;  // nullopt is "na"
  std::size_t truth_k = 0;
  bool exact_match = false;
};

// Distinct nonzero label count.
std::size_t count_clusters(std::span<const int> labels);

EvalReport evaluate(std::span<const int> predicted, std::span<const int> truth,
                    std::optional<std::size_t> predicted_k, std::size_t truth_k,
                    OutlierPolicy policy = OutlierPolicy::kSingletons);

/// Percentage of exact matches; throws ContractViolation on an empty list.
double corpus_accuracy(std::span<const EvalReport> reports);
double corpus_accuracy(std::size_t matches, std::size_t total);

}  // namespace pfclust
