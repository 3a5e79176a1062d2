#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "pfclust/preprocess.hpp"

namespace pfclust {

enum class Delimiter { kAuto, kComma, kSemicolon, kWhitespace };

// Accepts auto, comma or ",", semicolon or ";", whitespace/space/tab.
Delimiter parse_delimiter(std::string_view text);

struct LoadOptions {
  Delimiter delimiter = Delimiter::kAuto;
  std::optional<std::size_t> label_column;  // 1-based
  bool header = false;
  // Label text that marks noise points; they get label id 0.
  std::optional<std::string> noise_label;
};

/// Reads one point per line. Blank lines and lines starting with '#' are
/// skipped. Labels are dictionary-encoded to 1..m in order of first
/// appearance. Throws IngestError naming the line and column of any problem.
Dataset load_dataset(const std::filesystem::path& path, const LoadOptions& options = {});
Dataset parse_dataset(std::istream& in, const LoadOptions& options, std::string name);

/// Comma-delimited, shortest round-trip decimal form; label ids (if any) last.
void write_dataset(const Dataset& data, std::ostream& out);

struct ManifestEntry {
  std::string name;
  std::filesystem::path path;  // resolved against the manifest's directory
  std::size_t truth_k = 0;
  LoadOptions load;
  bool available = false;  // file present when the manifest was read
};

struct CorpusManifest {
  std::vector<ManifestEntry> entries;
};

/// INI-style manifest:
///
///   # comment
///   [s2]
///   path = s2.txt
///   truth_k = 15
///   label_col = 3        (optional, 1-based)
///   delimiter = auto     (optional)
///   header = false       (optional)
///   noise_label = 0      (optional)
///
/// Missing data files are kept with `available = false`.
CorpusManifest load_manifest(const std::filesystem::path& path);
CorpusManifest parse_manifest(std::istream& in, const std::filesystem::path& base_dir);

struct SyntheticSpec {
  std::string name = "synthetic";
  std::size_t cluster_count = 2;
  std::vector<std::size_t> points_per_cluster{50, 50};
  std::size_t dimension = 2;
  // Minimum per-axis centre gap in units of the largest spread.
  double center_separation = 10.0;
  std::vector<double> spread_per_cluster{1.0, 1.0};
  // Uniform noise points added, as a fraction of the clustered points.
  double noise_fraction = 0.0;
  std::uint64_t seed = 0;
  // Shuffle rows; otherwise clusters are emitted in order, noise last.
  bool shuffle = true;
};

void validate(const SyntheticSpec& spec);

/// Isotropic Gaussian blobs on a shuffled lattice (each axis holds a random
/// permutation of the k centre levels) plus uniform noise
/// (label 0) over the padded bounding box of the centres.
/// Depends only on the spec; uses no platform-defined distributions.
Dataset generate_synthetic(const SyntheticSpec& spec);

/// Number of noise points generate_synthetic adds for a spec.
std::size_t noise_point_count(const SyntheticSpec& spec);

}  // namespace pfclust
