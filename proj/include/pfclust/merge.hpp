#pragma once

#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

#include "pfclust/detect.hpp"
#include "pfclust/matrix.hpp"

namespace pfclust {

/// Size-normalized within-cluster cost: sum_j (1/s_j) sum_{C(i)=j} |z_i - c_j|^2.
/// Centroids are recomputed from the assignment; points with id 0 are ignored.
/// Throws ContractViolation when no cluster is present.
double cost_w(const Matrix& z, const std::vector<int>& assignment);

/// Plain sum of squared deviations from cluster means. Diagnostic only.
double cost_ssw(const Matrix& z, const std::vector<int>& assignment);

/// Final cluster count from a cluster-size distribution.
///
/// Sizes are sorted descending (stable), then the smallest k in 2..p with
///   sum_{i<k} (s_i - s_k) s_i  >  sum_{j>k} (s_k - s_j) s_j
/// is returned. Returns p when no k qualifies and 1 when p == 1.
std::size_t estimate_k(std::vector<std::size_t> sizes);

struct KEstimate {
  std::size_t k = 0;
  // False when no candidate satisfied the inequality (k falls back to p).
  bool satisfied = false;
};
KEstimate estimate_k_detailed(std::vector<std::size_t> sizes);

struct MergeStep {
  int a;  // surviving id (smaller), in pre-merge numbering
  int b;  // absorbed id
  double distance;
};

struct MergePlan {
  std::size_t initial_count = 0;  // p
  std::size_t k_estimate = 0;
  // True when no k in 2..p satisfied the size inequality and k = p was used.
  bool k_defaulted = false;
  std::vector<MergeStep> steps;
  double cost_before = 0.0;
  double cost_after = 0.0;
  bool accepted = true;
  std::vector<int> merged_assignment;  // C', ids 1..k
  std::vector<int> final_assignment;   // C' if accepted, else C

  std::size_t final_count() const noexcept { return accepted ? k_estimate : initial_count; }
};

/// Greedy closest-centroid merging from p clusters down to `k_estimate`, kept
/// only when the cost W does not increase. Ties in centroid distance go to the
/// lexicographically smallest (a, b) id pair. Outliers stay 0 throughout.
MergePlan merge_clusters(const Matrix& z, const Clustering& clustering, std::size_t k_estimate);

/// estimate_k on the clustering's sizes, then merge_clusters.
MergePlan plan_merge(const Matrix& z, const Clustering& clustering);

/// Final count, or nullopt ("na") when it exceeds sqrt(n).
std::optional<std::size_t> report_cluster_count(const MergePlan& plan, std::size_t n);
std::optional<std::size_t> report_cluster_count(std::size_t count, std::size_t n);

}  // namespace pfclust
