#include "pfclust/merge.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fmt/format.h>
#include <functional>
#include <limits>

#include "pfclust/errors.hpp"

namespace pfclust {
namespace {

std::size_t max_id(const std::vector<int>& assignment) {
  int p = 0;
  for (int c : assignment) {
    if (c < 0) throw ContractViolation(fmt::format("negative cluster id {}", c));
    p = std::max(p, c);
  }
  return static_cast<std::size_t>(p);
}

// Per-cluster sum of squared deviations from the exact member mean.
std::pair<std::vector<double>, std::vector<std::size_t>> within_sums(
    const Matrix& z, const std::vector<int>& assignment) {
  if (assignment.size() != z.rows()) {
    throw ContractViolation(fmt::format("assignment has {} entries for {} points",
                                        assignment.size(), z.rows()));
  }
  const std::size_t p = max_id(assignment);
  if (p == 0) throw ContractViolation("cost is undefined without clusters");
  const Matrix centroids = batch_centroids(z, assignment, p);
  std::vector<double> sums(p, 0.0);
  std::vector<std::size_t> sizes(p, 0);
  for (std::size_t i = 0; i < assignment.size(); ++i) {
    if (assignment[i] == 0) continue;
    const auto k = static_cast<std::size_t>(assignment[i] - 1);
    sums[k] += squared_distance(z.row(i), centroids.row(k));
    ++sizes[k];
  }
  return {std::move(sums), std::move(sizes)};
}

}  // namespace

double cost_w(const Matrix& z, const std::vector<int>& assignment) {
  const auto [sums, sizes] = within_sums(z, assignment);
  double w = 0.0;
  for (std::size_t k = 0; k < sums.size(); ++k) {
    if (sizes[k] > 0) w += sums[k] / static_cast<double>(sizes[k]);
  }
  return w;
}

double cost_ssw(const Matrix& z, const std::vector<int>& assignment) {
  const auto [sums, sizes] = within_sums(z, assignment);
  double ssw = 0.0;
  for (double s : sums) ssw += s;
  return ssw;
}

std::size_t estimate_k(std::vector<std::size_t> sizes) {
  return estimate_k_detailed(std::move(sizes)).k;
}

KEstimate estimate_k_detailed(std::vector<std::size_t> sizes) {
  const std::size_t p = sizes.size();
  if (p == 0) throw ContractViolation("estimate_k needs at least one cluster");
  if (p == 1) return {1, true};
  std::stable_sort(sizes.begin(), sizes.end(), std::greater<>{});
  std::vector<std::int64_t> s(sizes.begin(), sizes.end());
  for (std::size_t k = 1; k < p; ++k) {  // 0-based k, i.e. candidates 2..p
    std::int64_t larger = 0;
    for (std::size_t i = 0; i < k; ++i) larger += (s[i] - s[k]) * s[i];
    std::int64_t smaller = 0;
    for (std::size_t j = k + 1; j < p; ++j) smaller += (s[k] - s[j]) * s[j];
    if (larger > smaller) return {k + 1, true};
  }
  return {p, false};
}

MergePlan merge_clusters(const Matrix& z, const Clustering& clustering, std::size_t k_estimate) {
  const std::size_t p = clustering.cluster_count();
  if (p == 0) throw ContractViolation("merge needs at least one cluster");
  if (k_estimate < 1 || k_estimate > p) {
    throw ContractViolation(fmt::format("cannot merge {} clusters into {}", p, k_estimate));
  }

  MergePlan plan;
  plan.initial_count = p;
  plan.k_estimate = k_estimate;

  Matrix centroids = batch_centroids(z, clustering.assignment, p);
  std::vector<double> sizes(clustering.sizes.begin(), clustering.sizes.end());
  std::vector<bool> active(p, true);
  std::vector<std::size_t> owner(p);
  for (std::size_t k = 0; k < p; ++k) owner[k] = k;

  // Squared centroid distances; each row caches its nearest active j > i.
  constexpr double kInf = std::numeric_limits<double>::infinity();
  Matrix dist(p, p);
  for (std::size_t i = 0; i < p; ++i) {
    for (std::size_t j = i + 1; j < p; ++j) {
      dist(i, j) = dist(j, i) = squared_distance(centroids.row(i), centroids.row(j));
    }
  }
  std::vector<std::size_t> nearest(p, p);
  std::vector<double> nearest_dist(p, kInf);
  auto refresh_row = [&](std::size_t i) {
    nearest[i] = p;
    nearest_dist[i] = kInf;
    for (std::size_t j = i + 1; j < p; ++j) {
      if (active[j] && dist(i, j) < nearest_dist[i]) {
        nearest[i] = j;
        nearest_dist[i] = dist(i, j);
      }
    }
  };
  for (std::size_t i = 0; i < p; ++i) refresh_row(i);

  for (std::size_t step = 0; step < p - k_estimate; ++step) {
    std::size_t a = p;
    for (std::size_t i = 0; i < p; ++i) {
      if (active[i] && nearest[i] < p && (a == p || nearest_dist[i] < nearest_dist[a])) a = i;
    }
    const std::size_t b = nearest[a];
    plan.steps.push_back(
        {static_cast<int>(a + 1), static_cast<int>(b + 1), std::sqrt(nearest_dist[a])});

    const double total = sizes[a] + sizes[b];
    auto ca = centroids.row(a);
    auto cb = centroids.row(b);
    for (std::size_t t = 0; t < ca.size(); ++t) {
      ca[t] = (sizes[a] * ca[t] + sizes[b] * cb[t]) / total;
    }
    sizes[a] = total;
    active[b] = false;
    for (auto& o : owner) {
      if (o == b) o = a;
    }

    for (std::size_t j = 0; j < p; ++j) {
      if (active[j] && j != a) dist(a, j) = dist(j, a) = squared_distance(ca, centroids.row(j));
    }
    refresh_row(a);
    for (std::size_t i = 0; i < b; ++i) {
      if (!active[i] || i == a) continue;
      if (nearest[i] == a || nearest[i] == b) {
        refresh_row(i);
      } else if (i < a && (dist(i, a) < nearest_dist[i] ||
                           (dist(i, a) == nearest_dist[i] && a < nearest[i]))) {
        nearest[i] = a;
        nearest_dist[i] = dist(i, a);
      }
    }
  }

  std::vector<int> relabel(p, 0);
  int next = 0;
  for (std::size_t k = 0; k < p; ++k) {
    if (active[k]) relabel[k] = ++next;
  }
  plan.merged_assignment.resize(clustering.assignment.size());
  for (std::size_t i = 0; i < clustering.assignment.size(); ++i) {
    const int c = clustering.assignment[i];
    plan.merged_assignment[i] = c == 0 ? 0 : relabel[owner[static_cast<std::size_t>(c - 1)]];
  }

  plan.cost_before = cost_w(z, clustering.assignment);
  plan.cost_after = cost_w(z, plan.merged_assignment);
  plan.accepted = !(plan.cost_after > plan.cost_before);
  plan.final_assignment = plan.accepted ? plan.merged_assignment : clustering.assignment;
  return plan;
}

MergePlan plan_merge(const Matrix& z, const Clustering& clustering) {
  const KEstimate estimate = estimate_k_detailed(clustering.sizes);
  MergePlan plan = merge_clusters(z, clustering, estimate.k);
  plan.k_defaulted = !estimate.satisfied;
  return plan;
}

std::optional<std::size_t> report_cluster_count(std::size_t count, std::size_t n) {
  if (count * count > n) return std::nullopt;
  return count;
}

std::optional<std::size_t> report_cluster_count(const MergePlan& plan, std::size_t n) {
  return report_cluster_count(plan.final_count(), n);
}

}  // namespace pfclust
