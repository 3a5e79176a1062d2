#include "pfclust/detect.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>

#include "pfclust/errors.hpp"
#include "pfclust/preprocess.hpp"

namespace pfclust {

IncrementalClustering::IncrementalClustering(const Matrix& z)
    : z_(&z), assignment_(z.rows(), 0), centroids_(z.rows(), z.cols()) {
  sizes_.reserve(z.rows());
}

std::size_t IncrementalClustering::index(int cluster) const {
  if (cluster < 1 || cluster > opened()) {
    throw ContractViolation(fmt::format("unknown cluster id {}", cluster));
  }
  return static_cast<std::size_t>(cluster - 1);
}

int IncrementalClustering::open_cluster(std::size_t point) {
  if (assignment_.at(point) != 0) {
    throw ContractViolation(fmt::format("point {} is already assigned", point + 1));
  }
  if (sizes_.size() == centroids_.rows()) {
    throw ContractViolation("cannot open more clusters than points");
  }
  sizes_.push_back(0);
  const int id = opened();
  add_point(id, point);
  return id;
}

void IncrementalClustering::add_point(int cluster, std::size_t point) {
  if (assignment_.at(point) != 0) {
    throw ContractViolation(fmt::format("point {} is already assigned", point + 1));
  }
  const std::size_t k = index(cluster);
  const double s = static_cast<double>(sizes_[k]);
  auto c = centroids_.row(k);
  auto x = z_->row(point);
  for (std::size_t t = 0; t < c.size(); ++t) c[t] = (s * c[t] + x[t]) / (s + 1.0);
  ++sizes_[k];
  assignment_[point] = cluster;
}

void IncrementalClustering::remove_point(std::size_t point) {
  const int cluster = assignment_.at(point);
  if (cluster == 0) {
    throw ContractViolation(fmt::format("point {} is not assigned", point + 1));
  }
  const std::size_t k = index(cluster);
  auto c = centroids_.row(k);
  if (sizes_[k] == 1) {
    std::fill(c.begin(), c.end(), 0.0);
  } else {
    const double s = static_cast<double>(sizes_[k]);
    auto x = z_->row(point);
    for (std::size_t t = 0; t < c.size(); ++t) c[t] = (s * c[t] - x[t]) / (s - 1.0);
  }
  --sizes_[k];
  assignment_[point] = 0;
}

void IncrementalClustering::move_point(std::size_t point, int to) {
  remove_point(point);
  add_point(to, point);
}

Clustering IncrementalClustering::finish() const {
  std::vector<int> remap(sizes_.size() + 1, 0);
  int next = 0;
  for (std::size_t k = 0; k < sizes_.size(); ++k) {
    if (sizes_[k] > 0) remap[k + 1] = ++next;
  }
  Clustering out;
  out.assignment.resize(assignment_.size());
  for (std::size_t i = 0; i < assignment_.size(); ++i) out.assignment[i] = remap[assignment_[i]];
  out.centroids = Matrix(static_cast<std::size_t>(next), z_->cols());
  for (std::size_t k = 0; k < sizes_.size(); ++k) {
    if (sizes_[k] == 0) continue;
    out.sizes.push_back(sizes_[k]);
    const auto src = centroids_.row(k);
    std::copy(src.begin(), src.end(), out.centroids.row(out.sizes.size() - 1).begin());
  }
  for (std::size_t i = 0; i < out.assignment.size(); ++i) {
    if (out.assignment[i] == 0) out.outliers.push_back(i);
  }
  return out;
}

Clustering find_clusters(const Matrix& z, double sigma, double threshold, ScanTrace* trace) {
  const std::size_t n = z.rows();
  IncrementalClustering state(z);
  if (n == 0) return state.finish();

  if (!(sigma > 0.0)) {
    const int only = state.open_cluster(0);
    for (std::size_t j = 1; j < n; ++j) state.add_point(only, j);
    return state.finish();
  }

  for (std::size_t i = 0; i < n; ++i) {
    if (state.cluster_of(i) != 0) continue;
    const int k = state.open_cluster(i);
    for (std::size_t j = 0; j < n; ++j) {
      const int current = state.cluster_of(j);
      if (current == 0) {
        const double dist2 = squared_distance(state.centroid(k), z.row(j));
        if (gaussian_affinity(dist2, sigma) > threshold) state.add_point(k, j);
      } else if (current != k) {
        const double to_new = squared_distance(state.centroid(k), z.row(j));
        const double to_old = squared_distance(state.centroid(current), z.row(j));
        if (to_new < to_old) {
          if (trace) {
            trace->shifts.push_back({j, current, k, std::sqrt(to_old), std::sqrt(to_new)});
          }
          state.move_point(j, k);
        }
      }
    }
  }
  return state.finish();
}

Clustering extract_outliers(const Clustering& clustering) {
  const std::size_t p = clustering.cluster_count();
  std::vector<int> remap(p + 1, 0);
  Clustering out;
  std::size_t kept = 0;
  for (std::size_t k = 0; k < p; ++k) {
    if (clustering.sizes[k] > 1) {
      remap[k + 1] = static_cast<int>(++kept);
      out.sizes.push_back(clustering.sizes[k]);
    }
  }
  out.centroids = Matrix(kept, clustering.centroids.cols());
  for (std::size_t k = 0; k < p; ++k) {
    if (remap[k + 1] == 0) continue;
    const auto src = clustering.centroids.row(k);
    std::copy(src.begin(), src.end(),
              out.centroids.row(static_cast<std::size_t>(remap[k + 1] - 1)).begin());
  }
  out.assignment.resize(clustering.assignment.size());
  for (std::size_t i = 0; i < out.assignment.size(); ++i) {
    out.assignment[i] = remap[clustering.assignment[i]];
    if (out.assignment[i] == 0) out.outliers.push_back(i);
  }
  return out;
}

Matrix batch_centroids(const Matrix& z, const std::vector<int>& assignment, std::size_t p) {
  Matrix sums(p, z.cols());
  std::vector<std::size_t> counts(p, 0);
  for (std::size_t i = 0; i < assignment.size(); ++i) {
    const int c = assignment[i];
    if (c == 0) continue;
    if (c < 0 || static_cast<std::size_t>(c) > p) {
      throw ContractViolation(fmt::format("assignment id {} outside 1..{}", c, p));
    }
    auto row = sums.row(static_cast<std::size_t>(c - 1));
    auto x = z.row(i);
    for (std::size_t t = 0; t < row.size(); ++t) row[t] += x[t];
    ++counts[static_cast<std::size_t>(c - 1)];
  }
  for (std::size_t k = 0; k < p; ++k) {
    if (counts[k] == 0) continue;
    for (double& v : sums.row(k)) v /= static_cast<double>(counts[k]);
  }
  return sums;
}

}  // namespace pfclust
