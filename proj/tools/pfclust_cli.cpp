// pfclust: parameter-free affinity clustering from the command line.
//
//   pfclust cluster    --input data.csv [--label-col 3] [--bins 10]
//   pfclust evaluate   --input data.csv --label-col 3
//   pfclust histogram  --input data.csv
//   pfclust sweep-bins --manifest corpus.ini --bins-range 2:30
//   pfclust bench      --manifest corpus.ini
//
// Exit codes: 0 success, 2 input or configuration error, 3 degenerate data.

#include <CLI11.hpp>
#include <charconv>
#include <fmt/format.h>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "pfclust/data.hpp"
#include "pfclust/errors.hpp"
#include "pfclust/evaluate.hpp"
#include "pfclust/pipeline.hpp"
#include "pfclust/report.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 2;
constexpr int kExitDegenerate = 3;

struct CommonOptions {
  std::string input;
  std::string delimiter = "auto";
  std::optional<std::size_t> label_col;
  bool header = false;
  std::optional<std::string> noise_label;
  int bins = pfclust::kDefaultBins;
  std::string outlier_policy = "singletons";
  std::string format = "json";
  std::string output;
  bool timings = false;
};

pfclust::LoadOptions load_options(const CommonOptions& o) {
  pfclust::LoadOptions load;
  load.delimiter = pfclust::parse_delimiter(o.delimiter);
  load.label_column = o.label_col;
  load.header = o.header;
  load.noise_label = o.noise_label;
  return load;
}

pfclust::Dataset load_input(const CommonOptions& o) {
  if (o.input.empty()) throw pfclust::IngestError("--input is required");
  return pfclust::load_dataset(o.input, load_options(o));
}

void emit(const CommonOptions& o, const std::string& text) {
  if (o.output.empty()) {
    std::cout << text;
    std::cout.flush();
    return;
  }
  std::ofstream out(o.output, std::ios::binary);
  if (!out) throw pfclust::IngestError(fmt::format("cannot write '{}'", o.output));
  out << text;
}

int degenerate_exit(const pfclust::RunResult& run) {
  if (run.degeneracy == pfclust::Degeneracy::kNone) return kExitOk;
  std::cerr << fmt::format("pfclust: degenerate data ({})\n", pfclust::to_string(run.degeneracy));
  return kExitDegenerate;
}

// "10", "2:30" or "2,5,10".
std::vector<int> parse_bin_range(const std::string& text) {
  auto to_int = [&](std::string_view s) {
    int v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size() || v < 2) {
      throw pfclust::IngestError(fmt::format("invalid bin count '{}' in '{}'", s, text));
    }
    return v;
  };
  std::vector<int> out;
  if (const auto colon = text.find(':'); colon != std::string::npos) {
    const int lo = to_int(std::string_view(text).substr(0, colon));
    const int hi = to_int(std::string_view(text).substr(colon + 1));
    if (hi < lo) throw pfclust::IngestError(fmt::format("empty bin range '{}'", text));
    for (int b = lo; b <= hi; ++b) out.push_back(b);
    return out;
  }
  std::string_view rest = text;
  while (!rest.empty()) {
    const auto comma = rest.find(',');
    out.push_back(to_int(rest.substr(0, comma)));
    if (comma == std::string_view::npos) break;
    rest.remove_prefix(comma + 1);
  }
  if (out.empty()) throw pfclust::IngestError("empty bin range");
  return out;
}

void add_data_flags(CLI::App* cmd, CommonOptions& o, bool with_input) {
  if (with_input) cmd->add_option("--input,-i", o.input, "Delimited data file");
  cmd->add_option("--delimiter", o.delimiter, "auto, comma, semicolon or whitespace");
  cmd->add_option("--label-col", o.label_col, "1-based ground-truth label column");
  cmd->add_flag("--header", o.header, "Skip the first non-comment line");
  cmd->add_option("--noise-label", o.noise_label, "Label value marking ground-truth noise");
  cmd->add_option("--bins", o.bins, "Affinity histogram bins")->check(CLI::Range(2, 100000));
  cmd->add_option("--outlier-policy", o.outlier_policy, "singletons or exclude")
      ->check(CLI::IsMember({"singletons", "exclude"}));
  cmd->add_option("--format", o.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
  cmd->add_option("--output,-o", o.output, "Output file (default stdout)");
}

int run_cluster(const CommonOptions& o) {
  const pfclust::Dataset data = load_input(o);
  const pfclust::RunResult run = pfclust::run_pipeline(data, {o.bins});
  emit(o, pfclust::parse_output_format(o.format) == pfclust::OutputFormat::kJson
              ? pfclust::cluster_json(data.name, run, o.timings)
              : pfclust::cluster_csv(run));
  return degenerate_exit(run);
}

int run_histogram(const CommonOptions& o) {
  const pfclust::Dataset data = load_input(o);
  const pfclust::RunResult run = pfclust::run_pipeline(data, {o.bins});
  emit(o, pfclust::parse_output_format(o.format) == pfclust::OutputFormat::kJson
              ? pfclust::histogram_json(data.name, run)
              : pfclust::histogram_csv(run));
  return degenerate_exit(run);
}

int run_evaluate(const CommonOptions& o) {
  const pfclust::Dataset data = load_input(o);
  if (!data.labels) {
    throw pfclust::IngestError("evaluate needs ground-truth labels (--label-col)");
  }
  const pfclust::RunResult run = pfclust::run_pipeline(data, {o.bins});
  const auto policy = pfclust::parse_outlier_policy(o.outlier_policy);
  const pfclust::EvalReport eval =
      pfclust::evaluate(run.assignment, *data.labels, run.final_count,
                        pfclust::count_clusters(*data.labels), policy);
  emit(o, pfclust::parse_output_format(o.format) == pfclust::OutputFormat::kJson
              ? pfclust::evaluate_json(data.name, run, eval, policy)
              : pfclust::evaluate_csv(data.name, eval));
  return degenerate_exit(run);
}

pfclust::CorpusManifest manifest_or_input(const CommonOptions& o, const std::string& manifest,
                                          std::optional<std::size_t> truth_k) {
  if (!manifest.empty()) return pfclust::load_manifest(manifest);
  if (o.input.empty()) throw pfclust::IngestError("--manifest or --input is required");
  pfclust::ManifestEntry entry;
  entry.path = o.input;
  entry.name = entry.path.stem().string();
  entry.load = load_options(o);
  entry.available = std::filesystem::is_regular_file(entry.path);
  if (truth_k) {
    entry.truth_k = *truth_k;
  } else if (entry.available && o.label_col) {
    const auto data = pfclust::load_dataset(entry.path, entry.load);
    entry.truth_k = pfclust::count_clusters(*data.labels);
  } else {
    throw pfclust::IngestError("--truth-k or --label-col is required with --input");
  }
  return {{entry}};
}

int run_sweep(const CommonOptions& o, const std::string& manifest,
              std::optional<std::size_t> truth_k, const std::string& range) {
  const auto corpus = manifest_or_input(o, manifest, truth_k);
  if (corpus.entries.empty()) throw pfclust::IngestError("manifest lists no datasets");
  const auto sweep = pfclust::sweep_bins(corpus, parse_bin_range(range));
  emit(o, pfclust::parse_output_format(o.format) == pfclust::OutputFormat::kJson
              ? pfclust::sweep_json(sweep)
              : pfclust::sweep_csv(sweep));
  return kExitOk;
}

int run_bench(const CommonOptions& o, const std::string& manifest) {
  if (manifest.empty()) throw pfclust::IngestError("--manifest is required");
  const auto corpus = pfclust::load_manifest(manifest);
  if (corpus.entries.empty()) throw pfclust::IngestError("manifest lists no datasets");
  const auto report =
      pfclust::run_bench(corpus, o.bins, pfclust::parse_outlier_policy(o.outlier_policy));
  emit(o, pfclust::parse_output_format(o.format) == pfclust::OutputFormat::kJson
              ? pfclust::bench_json(report, o.timings)
              : pfclust::bench_csv(report));
  std::cerr << fmt::format("pfclust bench: {} of {} matched, {:.1f} ms\n", report.matches,
                           report.evaluated, report.wall_ms);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Parameter-free affinity clustering"};
  app.require_subcommand(1);

  CommonOptions opts;
  std::string manifest;
  std::optional<std::size_t> truth_k;
  std::string range = "2:30";

  auto* cluster = app.add_subcommand("cluster", "Cluster a dataset");
  add_data_flags(cluster, opts, true);
  cluster->add_flag("--timings", opts.timings, "Include per-stage timings");

  auto* evaluate = app.add_subcommand("evaluate", "Cluster and score against ground truth");
  add_data_flags(evaluate, opts, true);

  auto* histogram = app.add_subcommand("histogram", "Dump the affinity histogram and threshold");
  add_data_flags(histogram, opts, true);

  auto* sweep = app.add_subcommand("sweep-bins", "Cluster-count accuracy per histogram bin count");
  add_data_flags(sweep, opts, true);
  sweep->add_option("--manifest", manifest, "Corpus manifest");
  sweep->add_option("--truth-k", truth_k, "Known cluster count for --input");
  sweep->add_option("--bins-range", range, "Bin counts: 10, 2:30 or 2,5,10");

  auto* bench = app.add_subcommand("bench", "Run the corpus benchmark");
  add_data_flags(bench, opts, false);
  bench->add_option("--manifest", manifest, "Corpus manifest")->required();
  bench->add_flag("--timings", opts.timings, "Include wall-clock timings in the report");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInput;
  }

  try {
    if (*cluster) return run_cluster(opts);
    if (*evaluate) return run_evaluate(opts);
    if (*histogram) return run_histogram(opts);
    if (*sweep) return run_sweep(opts, manifest, truth_k, range);
    if (*bench) return run_bench(opts, manifest);
  } catch (const pfclust::IngestError& e) {
    std::cerr << "pfclust: " << e.what() << '\n';
    return kExitInput;
  } catch (const pfclust::ContractViolation& e) {
    std::cerr << "pfclust: " << e.what() << '\n';
    return kExitInput;
  } catch (const pfclust::DegenerateDataError& e) {
    std::cerr << "pfclust: " << e.what() << '\n';
    return kExitDegenerate;
  }
  return kExitInput;
}
