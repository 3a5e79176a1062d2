#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "pfclust/matrix.hpp"

namespace pfclust {

inline constexpr int kDefaultBins = 10;

/// A numeric n x d dataset with optional ground truth.
///
/// Labels are dictionary-encoded cluster ids starting at 1. The id 0 is reserved
/// for points known to be noise (synthetic generators and files declaring a
/// noise label); evaluation treats those points like predicted outliers.
struct Dataset {
  std::string name;
  Matrix points;
  std::optional<std::vector<int>> labels;

  std::size_t size() const noexcept { return points.rows(); }
  std::size_t dimension() const noexcept { return points.cols(); }
};

// Throws ContractViolation when the dataset breaks its invariants
// (n >= 2, d >= 1, finite entries, label length).
void validate(const Dataset& data);

struct NormalizedData {
  Matrix z;
  std::vector<double> column_means;
  std::vector<double> column_stds;
};

struct DistanceMatrix {
  Matrix d;
  // Population standard deviation of all n^2 entries, diagonal included.
  double sigma = 0.0;
};

struct AffinityModel {
  Matrix a;
  std::vector<std::uint64_t> histogram;
  int bins = kDefaultBins;
  // 1-based bin after which the largest count increase occurs.
  int selected_bin = 0;
  double threshold = 0.0;
  // The sigma the Gaussian was built with (distance-matrix dispersion).
  double sigma = 0.0;
};

/// Column-wise z-scores using the population standard deviation.
/// Constant columns map to zero. Throws IngestError on non-finite input.
NormalizedData normalize(const Dataset& data);

/// Pairwise Euclidean distances between rows of `norm.z`, plus their dispersion.
DistanceMatrix distance_matrix(const NormalizedData& norm);

/// Gaussian affinity exp(-d^2 / (2 sigma)) for a squared distance.
double gaussian_affinity(double squared_distance, double sigma) noexcept;

/// Affinity matrix from distances. Throws DegenerateDataError when sigma == 0.
Matrix affinity_matrix(const DistanceMatrix& dm);

/// 1-based bin index ceil(v * bins) clamped to [1, bins].
int affinity_bin(double affinity, int bins) noexcept;

/// Counts of every entry of `a` (all n^2 ordered pairs) per affinity bin.
std::vector<std::uint64_t> affinity_histogram(const Matrix& a, int bins);

struct ThresholdChoice {
  int bin = 0;  // 1-based
  double threshold = 0.0;
};

/// Picks the bin k maximizing H(k+1) - H(k) (smallest k on ties) and returns
/// its centre ((k - 1) + 1/2) / b.
ThresholdChoice select_threshold(const std::vector<std::uint64_t>& histogram);

/// Runs affinity_matrix, affinity_histogram and select_threshold.
AffinityModel build_affinity_model(const DistanceMatrix& dm, int bins = kDefaultBins);

}  // namespace pfclust
