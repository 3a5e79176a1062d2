#include "pfclust/preprocess.hpp"

#include <cmath>
#include <fmt/format.h>

#include "parallel.hpp"
#include "pfclust/errors.hpp"

namespace pfclust {

void validate(const Dataset& data) {
  if (data.size() < 2) {
    throw ContractViolation(fmt::format("dataset '{}' needs at least 2 points, got {}", data.name,
                                        data.size()));
  }
  if (data.dimension() < 1) {
    throw ContractViolation(fmt::format("dataset '{}' has no feature columns", data.name));
  }
  if (data.labels && data.labels->size() != data.size()) {
    throw ContractViolation(fmt::format("dataset '{}' has {} labels for {} points", data.name,
                                        data.labels->size(), data.size()));
  }
}

NormalizedData normalize(const Dataset& data) {
  const std::size_t n = data.size();
  const std::size_t d = data.dimension();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      if (!std::isfinite(data.points(i, j))) {
        throw IngestError(fmt::format("non-finite value at row {}, column {}", i + 1, j + 1));
      }
    }
  }

  NormalizedData out{Matrix(n, d), std::vector<double>(d, 0.0), std::vector<double>(d, 0.0)};
  if (n == 0) return out;
  for (std::size_t j = 0; j < d; ++j) {
    double mean = 0.0;
    for (std::size_t i = 0; i < n; ++i) mean += data.points(i, j);
    mean /= static_cast<double>(n);
    double var = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double t = data.points(i, j) - mean;
      var += t * t;
    }
    const double sd = std::sqrt(var / static_cast<double>(n));
    out.column_means[j] = mean;
    out.column_stds[j] = sd;
    for (std::size_t i = 0; i < n; ++i) {
      out.z(i, j) = sd > 0.0 ? (data.points(i, j) - mean) / sd : 0.0;
    }
  }
  return out;
}

DistanceMatrix distance_matrix(const NormalizedData& norm) {
  const Matrix& z = norm.z;
  const std::size_t n = z.rows();
  DistanceMatrix out{Matrix(n, n), 0.0};
  if (n == 0) return out;

  // Upper triangle computed once and mirrored; each block owns its rows.
  detail::parallel_blocks(n, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        out.d(i, j) = std::sqrt(squared_distance(z.row(i), z.row(j)));
      }
    }
  });
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < i; ++j) out.d(i, j) = out.d(j, i);
  }

  // Row partial sums reduced in row order keep sigma schedule-independent.
  const double count = static_cast<double>(n) * static_cast<double>(n);
  std::vector<double> partial(n, 0.0);
  detail::parallel_blocks(n, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      double s = 0.0;
      for (double v : out.d.row(i)) s += v;
      partial[i] = s;
    }
  });
  double total = 0.0;
  for (double s : partial) total += s;
  const double mean = total / count;

  detail::parallel_blocks(n, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      double s = 0.0;
      for (double v : out.d.row(i)) s += (v - mean) * (v - mean);
      partial[i] = s;
    }
  });
  double sq = 0.0;
  for (double s : partial) sq += s;
  out.sigma = std::sqrt(sq / count);
  return out;
}

double gaussian_affinity(double squared_distance, double sigma) noexcept {
  return std::exp(-squared_distance / (2.0 * sigma));
}

Matrix affinity_matrix(const DistanceMatrix& dm) {
  if (!(dm.sigma > 0.0)) {
    throw DegenerateDataError("distance dispersion is zero: all points coincide");
  }
  const std::size_t n = dm.d.rows();
  Matrix a(n, n);
  detail::parallel_blocks(n, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        const double dist = dm.d(i, j);
        a(i, j) = gaussian_affinity(dist * dist, dm.sigma);
      }
    }
  });
  return a;
}

int affinity_bin(double affinity, int bins) noexcept {
  const double scaled = std::ceil(affinity * static_cast<double>(bins));
  if (!(scaled >= 1.0)) return 1;
  if (scaled >= static_cast<double>(bins)) return bins;
  return static_cast<int>(scaled);
}

std::vector<std::uint64_t> affinity_histogram(const Matrix& a, int bins) {
  if (bins < 2) throw ContractViolation(fmt::format("bin count must be >= 2, got {}", bins));
  const std::size_t n = a.rows();
  const auto b = static_cast<std::size_t>(bins);
  // One histogram per row; summing them is order-free.
  std::vector<std::uint64_t> per_row(n * b, 0);
  detail::parallel_blocks(n, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      std::uint64_t* h = per_row.data() + i * b;
      for (double v : a.row(i)) ++h[affinity_bin(v, bins) - 1];
    }
  });
  std::vector<std::uint64_t> hist(b, 0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < b; ++k) hist[k] += per_row[i * b + k];
  }
  return hist;
}

ThresholdChoice select_threshold(const std::vector<std::uint64_t>& histogram) {
  const std::size_t b = histogram.size();
  if (b < 2) throw ContractViolation("threshold selection needs at least 2 bins");
  int best = 1;
  std::int64_t best_jump = static_cast<std::int64_t>(histogram[1]) -
                           static_cast<std::int64_t>(histogram[0]);
  for (std::size_t i = 2; i < b; ++i) {
    const std::int64_t jump = static_cast<std::int64_t>(histogram[i]) -
                              static_cast<std::int64_t>(histogram[i - 1]);
    if (jump > best_jump) {
      best_jump = jump;
      best = static_cast<int>(i);
    }
  }
  return {best, (static_cast<double>(best - 1) + 0.5) / static_cast<double>(b)};
}

AffinityModel build_affinity_model(const DistanceMatrix& dm, int bins) {
  AffinityModel model;
  model.a = affinity_matrix(dm);
  model.bins = bins;
  model.sigma = dm.sigma;
  model.histogram = affinity_histogram(model.a, bins);
  const ThresholdChoice choice = select_threshold(model.histogram);
  model.selected_bin = choice.bin;
  model.threshold = choice.threshold;
  return model;
}

}  // namespace pfclust
