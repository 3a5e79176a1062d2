#pragma once

#include <cstddef>
#include <vector>

#include "pfclust/matrix.hpp"

namespace pfclust {

/// Result of the detection scan.
///
/// `assignment[i]` is the 1-based cluster id of point i, or 0 for an outlier.
/// `sizes[k - 1]` and `centroids.row(k - 1)` describe cluster k.
struct Clustering {
  std::vector<int> assignment;
  std::vector<std::size_t> sizes;
  Matrix centroids;
  // 0-based point indices, ascending.
  std::vector<std::size_t> outliers;

  std::size_t cluster_count() const noexcept { return sizes.size(); }
};

/// Cluster state with O(d) incremental centroid maintenance.
///
/// Slots are never reused: a cluster emptied by removals keeps its id with
/// size 0 until `finish()` compacts ids. `z` must outlive this object.
class IncrementalClustering {
 public:
  explicit IncrementalClustering(const Matrix& z);

  // Opens a new cluster whose centroid is the given point; returns its id.
  int open_cluster(std::size_t point);
  // Cnt(k) <- (s_k Cnt(k) + z_j) / (s_k + 1); the point must be unassigned.
  void add_point(int cluster, std::size_t point);
  // Cnt(k') <- (s_k' Cnt(k') - z_j) / (s_k' - 1) for k' = C(j); leaves j
  // unassigned. Removing the last member deletes the cluster (size 0).
  void remove_point(std::size_t point);
  // remove_point followed by add_point.
  void move_point(std::size_t point, int to);

  int cluster_of(std::size_t point) const { return assignment_[point]; }
  std::size_t size_of(int cluster) const { return sizes_[index(cluster)]; }
  std::span<const double> centroid(int cluster) const { return centroids_.row(index(cluster)); }
  // Number of ids opened so far, including emptied ones.
  int opened() const noexcept { return static_cast<int>(sizes_.size()); }
  std::size_t point_count() const noexcept { return assignment_.size(); }

  // Drops emptied clusters and renumbers the rest 1..p in opening order.
  Clustering finish() const;

 private:
  std::size_t index(int cluster) const;

  const Matrix* z_;
  std::vector<int> assignment_;
  std::vector<std::size_t> sizes_;
  Matrix centroids_;  // capacity n rows, one per possible cluster
};

struct ShiftEvent {
  std::size_t point;
  int from;
  int to;
  double distance_before;  // to the old centroid
  double distance_after;   // to the new centroid, before it absorbs the point
};

struct ScanTrace {
  std::vector<ShiftEvent> shifts;
};

/// Sequential affinity scan over the rows of `z` in input order.
///
/// Each unassigned point i opens a cluster, then one pass over all points
/// adds unassigned points whose centroid affinity exp(-|c - z_j|^2 / (2 sigma))
/// exceeds `threshold` and shifts assigned points that are strictly closer to
/// the new centroid than to their own. With sigma == 0 every point lands in a
/// single cluster. Outliers are not separated here.
Clustering find_clusters(const Matrix& z, double sigma, double threshold,
                         ScanTrace* trace = nullptr);

/// Moves every size-1 cluster's point into `outliers` (assignment 0) and
/// renumbers the remaining clusters 1..p keeping detection order.
Clustering extract_outliers(const Clustering& clustering);

/// Exact member means of clusters 1..p given an assignment (0 ignored).
Matrix batch_centroids(const Matrix& z, const std::vector<int>& assignment, std::size_t p);

}  // namespace pfclust
