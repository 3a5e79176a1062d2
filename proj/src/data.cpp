#include "pfclust/data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fmt/format.h>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <random>
#include <set>
#include <sstream>

#include "pfclust/errors.hpp"

namespace pfclust {
namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

Delimiter detect_delimiter(std::string_view line) {
  if (line.find(',') != std::string_view::npos) return Delimiter::kComma;
  if (line.find(';') != std::string_view::npos) return Delimiter::kSemicolon;
  return Delimiter::kWhitespace;
}

std::vector<std::string_view> split(std::string_view line, Delimiter delim) {
  std::vector<std::string_view> cells;
  if (delim == Delimiter::kWhitespace) {
    std::size_t pos = 0;
    while (pos < line.size()) {
      pos = line.find_first_not_of(" \t\r", pos);
      if (pos == std::string_view::npos) break;
      const auto end = std::min(line.find_first_of(" \t\r", pos), line.size());
      cells.push_back(line.substr(pos, end - pos));
      pos = end;
    }
    return cells;
  }
  const char sep = delim == Delimiter::kComma ? ',' : ';';
  std::size_t pos = 0;
  while (true) {
    const auto end = line.find(sep, pos);
    cells.push_back(trim(line.substr(pos, end == std::string_view::npos ? end : end - pos)));
    if (end == std::string_view::npos) break;
    pos = end + 1;
  }
  return cells;
}

std::optional<double> parse_number(std::string_view cell) {
  if (!cell.empty() && cell.front() == '+') cell.remove_prefix(1);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
  if (ec != std::errc{} || ptr != cell.data() + cell.size() || cell.empty()) return std::nullopt;
  return value;
}

// Portable generators: the standard distributions are implementation-defined.
class Random {
 public:
  explicit Random(std::uint64_t seed) : engine_(seed) {}

  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double normal() {
    if (cached_) {
      cached_ = false;
      return spare_;
    }
    double u1 = 0.0;
    do {
      u1 = uniform();
    } while (u1 <= 0.0);
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    spare_ = r * std::sin(2.0 * M_PI * u2);
    cached_ = true;
    return r * std::cos(2.0 * M_PI * u2);
  }

  std::size_t below(std::size_t bound) {
    return static_cast<std::size_t>(uniform() * static_cast<double>(bound));
  }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool cached_ = false;
};

bool parse_bool(std::string_view v, std::size_t line) {
  const std::string s = lower(v);
  if (s == "true" || s == "yes" || s == "1") return true;
  if (s == "false" || s == "no" || s == "0") return false;
  throw IngestError(fmt::format("manifest line {}: expected a boolean, got '{}'", line, v));
}

std::size_t parse_count(std::string_view v, std::size_t line, std::string_view key) {
  std::size_t out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || ptr != v.data() + v.size() || v.empty()) {
    throw IngestError(fmt::format("manifest line {}: {} must be a non-negative integer, got '{}'",
                                  line, key, v));
  }
  return out;
}

}  // namespace

Delimiter parse_delimiter(std::string_view text) {
  const std::string s = lower(text);
  if (s == "auto") return Delimiter::kAuto;
  if (s == "," || s == "comma") return Delimiter::kComma;
  if (s == ";" || s == "semicolon") return Delimiter::kSemicolon;
  if (s == "whitespace" || s == "space" || s == "tab" || s == "\\t" || s == "\t" || s == " ") {
    return Delimiter::kWhitespace;
  }
  throw IngestError(fmt::format("unknown delimiter '{}'", text));
}

Dataset parse_dataset(std::istream& in, const LoadOptions& options, std::string name) {
  Dataset out;
  out.name = std::move(name);
  Delimiter delim = options.delimiter;
  std::vector<double> values;
  std::vector<int> labels;
  std::map<std::string, int, std::less<>> label_ids;
  std::size_t width = 0;
  std::size_t features = 0;
  bool header_pending = options.header;
  std::string line;
  std::size_t line_no = 0;
  std::size_t rows = 0;

  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view view = trim(line);
    if (view.empty() || view.front() == '#') continue;
    if (delim == Delimiter::kAuto) delim = detect_delimiter(view);
    const auto cells = split(view, delim);
    if (header_pending) {
      header_pending = false;
      continue;
    }
    if (width == 0) {
      width = cells.size();
      if (options.label_column && (*options.label_column < 1 || *options.label_column > width)) {
        throw IngestError(fmt::format("{}: label column {} outside 1..{}", out.name,
                                      *options.label_column, width));
      }
      features = width - (options.label_column ? 1 : 0);
      if (features == 0) throw IngestError(fmt::format("{}: no feature columns", out.name));
    } else if (cells.size() != width) {
      throw IngestError(fmt::format("{}: line {} has {} columns, expected {}", out.name, line_no,
                                    cells.size(), width));
    }
    for (std::size_t c = 0; c < cells.size(); ++c) {
      if (options.label_column && c + 1 == *options.label_column) {
        if (options.noise_label && cells[c] == *options.noise_label) {
          labels.push_back(0);
        } else {
          auto [it, fresh] =
              label_ids.try_emplace(std::string(cells[c]), static_cast<int>(label_ids.size()) + 1);
          labels.push_back(it->second);
        }
        continue;
      }
      const auto v = parse_number(cells[c]);
      if (!v || !std::isfinite(*v)) {
        throw IngestError(fmt::format("{}: non-numeric value '{}' at line {}, column {}", out.name,
                                      cells[c], line_no, c + 1));
      }
      values.push_back(*v);
    }
    ++rows;
  }
  if (rows == 0) throw IngestError(fmt::format("{}: no data rows", out.name));
  out.points = Matrix(rows, features, std::move(values));
  if (options.label_column) out.labels = std::move(labels);
  return out;
}

Dataset load_dataset(const std::filesystem::path& path, const LoadOptions& options) {
  std::ifstream in(path);
  if (!in) throw IngestError(fmt::format("cannot open '{}'", path.string()));
  return parse_dataset(in, options, path.stem().string());
}

void write_dataset(const Dataset& data, std::ostream& out) {
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto row = data.points.row(i);
    for (std::size_t j = 0; j < row.size(); ++j) {
      if (j > 0) out << ',';
      out << fmt::format("{}", row[j]);
    }
    if (data.labels) out << ',' << (*data.labels)[i];
    out << '\n';
  }
}

CorpusManifest parse_manifest(std::istream& in, const std::filesystem::path& base_dir) {
  CorpusManifest manifest;
  std::set<std::string> names;
  std::vector<bool> has_truth;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view view = trim(line);
    if (view.empty() || view.front() == '#' || view.front() == ';') continue;
    if (view.front() == '[') {
      if (view.back() != ']') {
        throw IngestError(fmt::format("manifest line {}: unterminated section", line_no));
      }
      std::string name(trim(view.substr(1, view.size() - 2)));
      if (name.empty()) throw IngestError(fmt::format("manifest line {}: empty name", line_no));
      if (!names.insert(name).second) {
        throw IngestError(fmt::format("manifest line {}: duplicate dataset '{}'", line_no, name));
      }
      manifest.entries.push_back({});
      manifest.entries.back().name = std::move(name);
      has_truth.push_back(false);
      continue;
    }
    const auto eq = view.find('=');
    if (eq == std::string_view::npos) {
      throw IngestError(fmt::format("manifest line {}: expected key = value", line_no));
    }
    if (manifest.entries.empty()) {
      throw IngestError(fmt::format("manifest line {}: key outside a [dataset] section", line_no));
    }
    const std::string key = lower(trim(view.substr(0, eq)));
    const std::string_view value = trim(view.substr(eq + 1));
    ManifestEntry& entry = manifest.entries.back();
    if (key == "path") {
      entry.path = std::filesystem::path(std::string(value));
      if (entry.path.is_relative()) entry.path = base_dir / entry.path;
    } else if (key == "truth_k") {
      entry.truth_k = parse_count(value, line_no, key);
      if (entry.truth_k < 1) {
        throw IngestError(fmt::format("manifest line {}: truth_k must be >= 1", line_no));
      }
      has_truth.back() = true;
    } else if (key == "label_col") {
      entry.load.label_column = parse_count(value, line_no, key);
    } else if (key == "delimiter") {
      entry.load.delimiter = parse_delimiter(value);
    } else if (key == "header") {
      entry.load.header = parse_bool(value, line_no);
    } else if (key == "noise_label") {
      entry.load.noise_label = std::string(value);
    } else {
      throw IngestError(fmt::format("manifest line {}: unknown key '{}'", line_no, key));
    }
  }
  for (std::size_t i = 0; i < manifest.entries.size(); ++i) {
    const auto& e = manifest.entries[i];
    if (e.path.empty()) throw IngestError(fmt::format("dataset '{}' has no path", e.name));
    if (!has_truth[i]) throw IngestError(fmt::format("dataset '{}' has no truth_k", e.name));
    manifest.entries[i].available = std::filesystem::is_regular_file(e.path);
  }
  return manifest;
}

CorpusManifest load_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IngestError(fmt::format("cannot open manifest '{}'", path.string()));
  return parse_manifest(in, path.parent_path());
}

void validate(const SyntheticSpec& spec) {
  if (spec.cluster_count < 1) throw ContractViolation("synthetic spec needs at least one cluster");
  if (spec.points_per_cluster.size() != spec.cluster_count ||
      spec.spread_per_cluster.size() != spec.cluster_count) {
    throw ContractViolation("synthetic spec: per-cluster lists must match cluster_count");
  }
  if (spec.dimension < 1) throw ContractViolation("synthetic spec: dimension must be positive");
  for (auto c : spec.points_per_cluster) {
    if (c < 1) throw ContractViolation("synthetic spec: cluster sizes must be positive");
  }
  for (double s : spec.spread_per_cluster) {
    if (!(s > 0.0)) throw ContractViolation("synthetic spec: spreads must be positive");
  }
  if (!(spec.center_separation > 0.0)) {
    throw ContractViolation("synthetic spec: separation must be positive");
  }
  if (!(spec.noise_fraction >= 0.0 && spec.noise_fraction <= 0.5)) {
    throw ContractViolation("synthetic spec: noise fraction must lie in [0, 0.5]");
  }
}

std::size_t noise_point_count(const SyntheticSpec& spec) {
  std::size_t base = 0;
  for (auto c : spec.points_per_cluster) base += c;
  return static_cast<std::size_t>(std::llround(spec.noise_fraction * static_cast<double>(base)));
}

Dataset generate_synthetic(const SyntheticSpec& spec) {
  validate(spec);
  Random rng(spec.seed);
  const std::size_t k = spec.cluster_count;
  const std::size_t d = spec.dimension;
  const double spread = *std::max_element(spec.spread_per_cluster.begin(),
                                          spec.spread_per_cluster.end());
  const double min_gap = spec.center_separation * spread;

  // Latin-hypercube lattice: every pair of centres differs by at least
  // min_gap on every axis, so per-column scaling stays roughly isotropic.
  Matrix centers(k, d);
  std::vector<std::size_t> level(k);
  for (std::size_t t = 0; t < d; ++t) {
    for (std::size_t c = 0; c < k; ++c) level[c] = c;
    for (std::size_t i = k; i > 1; --i) std::swap(level[i - 1], level[rng.below(i)]);
    for (std::size_t c = 0; c < k; ++c) centers(c, t) = min_gap * static_cast<double>(level[c]);
  }

  std::size_t base = 0;
  for (auto c : spec.points_per_cluster) base += c;
  const std::size_t noise = noise_point_count(spec);
  const std::size_t n = base + noise;
  std::vector<double> values;
  values.reserve(n * d);
  std::vector<int> labels;
  labels.reserve(n);
  for (std::size_t c = 0; c < k; ++c) {
    for (std::size_t i = 0; i < spec.points_per_cluster[c]; ++i) {
      for (std::size_t t = 0; t < d; ++t) {
        values.push_back(centers(c, t) + spec.spread_per_cluster[c] * rng.normal());
      }
      labels.push_back(static_cast<int>(c + 1));
    }
  }

  std::vector<double> lo(d, 0.0);
  std::vector<double> hi(d, 0.0);
  for (std::size_t t = 0; t < d; ++t) {
    lo[t] = hi[t] = centers(0, t);
    for (std::size_t c = 1; c < k; ++c) {
      lo[t] = std::min(lo[t], centers(c, t));
      hi[t] = std::max(hi[t], centers(c, t));
    }
    lo[t] -= min_gap;
    hi[t] += min_gap;
  }
  for (std::size_t i = 0; i < noise; ++i) {
    for (std::size_t t = 0; t < d; ++t) values.push_back(lo[t] + rng.uniform() * (hi[t] - lo[t]));
    labels.push_back(0);
  }

  // Fisher-Yates with the portable generator.
  for (std::size_t i = spec.shuffle ? n : 0; i > 1; --i) {
    const std::size_t j = rng.below(i);
    if (j == i - 1) continue;
    std::swap_ranges(values.begin() + static_cast<std::ptrdiff_t>((i - 1) * d),
                     values.begin() + static_cast<std::ptrdiff_t>(i * d),
                     values.begin() + static_cast<std::ptrdiff_t>(j * d));
    std::swap(labels[i - 1], labels[j]);
  }

  Dataset out;
  out.name = spec.name;
  out.points = Matrix(n, d, std::move(values));
  out.labels = std::move(labels);
  return out;
}

}  // namespace pfclust
