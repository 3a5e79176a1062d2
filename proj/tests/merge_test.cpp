#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <random>

#include "pfclust/detect.hpp"
#include "pfclust/errors.hpp"
#include "pfclust/merge.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace pfclust;
using testing_support::from_rows;
using testing_support::random_matrix;
using oracles::brute_k;

namespace {

Clustering clustering_of(const Matrix& z, std::vector<int> assignment) {
  Clustering c;
  const int p = *std::max_element(assignment.begin(), assignment.end());
  c.sizes.assign(static_cast<std::size_t>(p), 0);
  for (std::size_t i = 0; i < assignment.size(); ++i) {
    if (assignment[i] == 0) {
      c.outliers.push_back(i);
    } else {
      ++c.sizes[static_cast<std::size_t>(assignment[i] - 1)];
    }
  }
  c.centroids = batch_centroids(z, assignment, static_cast<std::size_t>(p));
  c.assignment = std::move(assignment);
  return c;
}

double ssw_of(const Matrix& z, const std::vector<int>& a) {
  std::map<int, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] != 0) groups[a[i]].push_back(i);
  }
  double total = 0.0;
  for (const auto& [id, members] : groups) {
    for (std::size_t t = 0; t < z.cols(); ++t) {
      double mean = 0.0;
      for (auto i : members) mean += z(i, t);
      mean /= static_cast<double>(members.size());
      for (auto i : members) total += (z(i, t) - mean) * (z(i, t) - mean);
    }
  }
  return total;
}

struct OracleMerge {
  std::vector<std::pair<int, int>> steps;
  std::vector<int> assignment;
};

// Recomputes every centroid from the member lists before each step.
OracleMerge oracle_merge(const Matrix& z, const std::vector<int>& assignment, std::size_t p,
                         std::size_t k) {
  std::vector<std::vector<std::size_t>> members(p);
  for (std::size_t i = 0; i < assignment.size(); ++i) {
    if (assignment[i] != 0) members[static_cast<std::size_t>(assignment[i] - 1)].push_back(i);
  }
  auto centroid = [&](std::size_t g) {
    std::vector<double> c(z.cols(), 0.0);
    for (auto i : members[g]) {
      for (std::size_t t = 0; t < z.cols(); ++t) c[t] += z(i, t);
    }
    for (double& v : c) v /= static_cast<double>(members[g].size());
    return c;
  };
  OracleMerge out;
  for (std::size_t step = 0; step + k < p; ++step) {
    double best = std::numeric_limits<double>::infinity();
    std::size_t ba = 0;
    std::size_t bb = 0;
    for (std::size_t a = 0; a < p; ++a) {
      if (members[a].empty()) continue;
      for (std::size_t b = a + 1; b < p; ++b) {
        if (members[b].empty()) continue;
        const auto ca = centroid(a);
        const auto cb = centroid(b);
        double d = 0.0;
        for (std::size_t t = 0; t < ca.size(); ++t) d += (ca[t] - cb[t]) * (ca[t] - cb[t]);
        if (d < best) {
          best = d;
          ba = a;
          bb = b;
        }
      }
    }
    out.steps.emplace_back(static_cast<int>(ba + 1), static_cast<int>(bb + 1));
    members[ba].insert(members[ba].end(), members[bb].begin(), members[bb].end());
    members[bb].clear();
  }
  out.assignment.assign(assignment.size(), 0);
  int next = 0;
  for (const auto& m : members) {
    if (m.empty()) continue;
    ++next;
    for (auto i : m) out.assignment[i] = next;
  }
  return out;
}

}  // namespace

TEST(CostW, SingletonsCostNothing) {
  const Matrix z = from_rows({{0.0, 1.0}, {3.0, 4.0}, {5.0, 9.0}});
  EXPECT_EQ(cost_w(z, {1, 2, 3}), 0.0);
  EXPECT_EQ(cost_ssw(z, {1, 2, 3}), 0.0);
}

TEST(CostW, TwoPointCluster) {
  const Matrix z = from_rows({{0.0, 0.0}, {2.0, 0.0}});
  EXPECT_DOUBLE_EQ(cost_w(z, {1, 1}), 1.0);
  EXPECT_DOUBLE_EQ(cost_ssw(z, {1, 1}), 2.0);
}

TEST(CostW, IgnoresOutliersAndRejectsEmpty) {
  const Matrix z = from_rows({{0.0}, {2.0}, {100.0}});
  EXPECT_DOUBLE_EQ(cost_w(z, {1, 1, 0}), 1.0);
  EXPECT_THROW(cost_w(z, {0, 0, 0}), ContractViolation);
}

TEST(CostW, NeverExceedsSswAndSswShrinksUnderRefinement) {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 4 + rng() % 40;
    const Matrix z = random_matrix(rng, n, 1 + rng() % 4);
    std::vector<int> coarse(n);
    for (auto& c : coarse) c = 1 + static_cast<int>(rng() % 3);
    // Refine: split each coarse cluster by a random bit.
    std::vector<int> fine(n);
    for (std::size_t i = 0; i < n; ++i) fine[i] = 2 * coarse[i] - static_cast<int>(rng() % 2);
    const double w = cost_w(z, coarse);
    const double ssw = cost_ssw(z, coarse);
    ASSERT_LE(w, ssw + 1e-12);
    ASSERT_NEAR(ssw, ssw_of(z, coarse), 1e-9);
    ASSERT_LE(cost_ssw(z, fine), ssw + 1e-9);
    std::vector<int> single(n);
    for (std::size_t i = 0; i < n; ++i) single[i] = static_cast<int>(i) + 1;
    ASSERT_EQ(cost_ssw(z, single), 0.0);
  }
}

TEST(EstimateK, EqualSizesFallBackToP) {
  const auto e = estimate_k_detailed({5, 5, 5});
  EXPECT_EQ(e.k, 3u);
  EXPECT_FALSE(e.satisfied);
}

TEST(EstimateK, HandEvaluatedCase) {
  const auto e = estimate_k_detailed({10, 9, 1});
  EXPECT_EQ(e.k, 2u);
  EXPECT_TRUE(e.satisfied);
  EXPECT_EQ(estimate_k({1, 10, 9}), 2u);
}

TEST(EstimateK, SingleClusterGivesOne) { EXPECT_EQ(estimate_k({7}), 1u); }

TEST(EstimateK, MatchesBruteForceOnRandomVectors) {
  std::mt19937_64 rng(808);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t p = 1 + rng() % 20;
    const std::size_t cap = trial % 3 == 0 ? 6 : 500;
    std::vector<std::size_t> sizes(p);
    for (auto& s : sizes) s = 2 + rng() % cap;
    std::sort(sizes.begin(), sizes.end(), std::greater<>());
    ASSERT_EQ(estimate_k(sizes), brute_k(sizes)) << "trial " << trial;
    std::vector<std::size_t> shuffled = sizes;
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    ASSERT_EQ(estimate_k(shuffled), brute_k(sizes));
    std::vector<std::size_t> scaled = sizes;
    for (auto& s : scaled) s *= 37;
    ASSERT_EQ(estimate_k(scaled), brute_k(sizes));
  }
}

TEST(MergeClusters, NoMergeWhenEstimateEqualsP) {
  const Matrix z = from_rows({{0.0}, {0.1}, {5.0}, {5.1}, {50.0}});
  const auto c = clustering_of(z, {1, 1, 2, 2, 0});
  const auto plan = merge_clusters(z, c, 2);
  EXPECT_TRUE(plan.steps.empty());
  EXPECT_TRUE(plan.accepted);
  EXPECT_EQ(plan.cost_before, plan.cost_after);
  EXPECT_EQ(plan.final_assignment, c.assignment);
  EXPECT_EQ(plan.final_count(), 2u);
}

TEST(MergeClusters, GreedyMatchesRecomputedCentroids) {
  const Matrix z = from_rows({{0.0, 0.0}, {1.0, 0.0}, {1.5, 0.0}, {4.0, 0.0}, {9.0, 1.0},
                              {10.0, 1.0}});
  const std::vector<int> a{1, 2, 3, 4, 5, 6};
  const auto c = clustering_of(z, a);
  for (std::size_t k = 1; k <= 6; ++k) {
    const auto plan = merge_clusters(z, c, k);
    const auto oracle = oracle_merge(z, a, 6, k);
    ASSERT_EQ(plan.steps.size(), 6 - k);
    for (std::size_t s = 0; s < plan.steps.size(); ++s) {
      EXPECT_EQ(plan.steps[s].a, oracle.steps[s].first) << "k=" << k << " step " << s;
      EXPECT_EQ(plan.steps[s].b, oracle.steps[s].second) << "k=" << k << " step " << s;
    }
    EXPECT_EQ(plan.merged_assignment, oracle.assignment) << "k=" << k;
  }
}

TEST(MergeClusters, RandomInstancesMatchOracleAndVerdictRule) {
  std::mt19937_64 rng(909);
  for (int trial = 0; trial < 60; ++trial) {
    const std::size_t n = 6 + rng() % 50;
    const Matrix z = random_matrix(rng, n, 1 + rng() % 3);
    const std::size_t p = 2 + rng() % 6;
    std::vector<int> a(n);
    for (std::size_t i = 0; i < n; ++i) {
      a[i] = i < p ? static_cast<int>(i) + 1 : static_cast<int>(rng() % (p + 1));
    }
    const auto c = clustering_of(z, a);
    const std::size_t k = 1 + rng() % p;
    const auto plan = merge_clusters(z, c, k);
    const auto oracle = oracle_merge(z, a, p, k);
    ASSERT_EQ(plan.merged_assignment, oracle.assignment);
    ASSERT_NEAR(plan.cost_before, cost_w(z, a), 1e-12);
    ASSERT_NEAR(plan.cost_after, cost_w(z, oracle.assignment), 1e-12);
    ASSERT_EQ(plan.accepted, plan.cost_after <= plan.cost_before);
    if (!plan.accepted) ASSERT_EQ(plan.final_assignment, a);
    std::vector<int> ids;
    for (std::size_t i = 0; i < n; ++i) {
      if (a[i] == 0) ASSERT_EQ(plan.final_assignment[i], 0);
      if (plan.final_assignment[i] != 0) ids.push_back(plan.final_assignment[i]);
    }
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    ASSERT_EQ(ids.size(), plan.final_count());
  }
}

TEST(MergeClusters, DiscardsMergeThatRaisesCost) {
  // Two tight, far-apart pairs: merging them can only raise W.
  const Matrix z = from_rows({{0.0}, {0.1}, {10.0}, {10.1}});
  const auto plan = merge_clusters(z, clustering_of(z, {1, 1, 2, 2}), 1);
  EXPECT_FALSE(plan.accepted);
  EXPECT_GT(plan.cost_after, plan.cost_before);
  EXPECT_EQ(plan.final_assignment, (std::vector<int>{1, 1, 2, 2}));
  EXPECT_EQ(plan.final_count(), 2u);
}

TEST(MergeClusters, AcceptsMergeOfInterleavedFragments) {
  // Two interleaved halves of one group plus a far pair: W drops when joined.
  const Matrix z = from_rows({{0.0}, {1.0}, {2.0}, {3.0}, {4.0}, {5.0}, {100.0}, {100.2}});
  const auto plan = merge_clusters(z, clustering_of(z, {1, 2, 1, 2, 1, 2, 3, 3}), 2);
  ASSERT_EQ(plan.steps.size(), 1u);
  EXPECT_EQ(plan.steps[0].a, 1);
  EXPECT_EQ(plan.steps[0].b, 2);
  EXPECT_NEAR(plan.cost_before, 8.0 / 3.0 * 2.0 + 0.01, 1e-12);
  EXPECT_NEAR(plan.cost_after, 17.5 / 6.0 + 0.01, 1e-12);
  EXPECT_TRUE(plan.accepted);
  EXPECT_EQ(plan.final_assignment, (std::vector<int>{1, 1, 1, 1, 1, 1, 2, 2}));
}

TEST(PlanMerge, FlagsDefaultedEstimate) {
  const Matrix z = from_rows({{0.0}, {0.1}, {5.0}, {5.1}, {9.0}, {9.1}});
  const auto plan = plan_merge(z, clustering_of(z, {1, 1, 2, 2, 3, 3}));
  EXPECT_EQ(plan.k_estimate, 3u);
  EXPECT_TRUE(plan.k_defaulted);
  EXPECT_TRUE(plan.steps.empty());
}

TEST(ReportCount, MoreThanRootNIsNa) {
  EXPECT_EQ(report_cluster_count(4, 16), std::optional<std::size_t>(4));
  EXPECT_EQ(report_cluster_count(5, 100), std::optional<std::size_t>(5));
  EXPECT_EQ(report_cluster_count(41, 1728), std::optional<std::size_t>(41));
  EXPECT_EQ(report_cluster_count(42, 1728), std::nullopt);
  EXPECT_EQ(report_cluster_count(5, 16), std::nullopt);
}
