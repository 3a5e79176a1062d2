#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "pfclust/evaluate.hpp"
#include "pfclust/pipeline.hpp"

namespace pfclust {

inline constexpr int kSchemaVersion = 1;

enum class OutputFormat { kJson, kCsv };
OutputFormat parse_output_format(std::string_view text);

// Streaming JSON emitter. Objects put one member per line; arrays stay inline.
// Reals are printed with six decimals, non-finite reals as null.
class JsonWriter {
 public:
  JsonWriter& begin_object();
  JsonWriter& end_object();
  JsonWriter& begin_array();
  JsonWriter& end_array();
  JsonWriter& key(std::string_view name);

  JsonWriter& value(std::string_view s);
  JsonWriter& value(const char* s) { return value(std::string_view(s)); }
  JsonWriter& value(bool b);
  JsonWriter& value(double v);
  JsonWriter& value(std::int64_t v);
  JsonWriter& value(std::uint64_t v);
  JsonWriter& value(int v) { return value(static_cast<std::int64_t>(v)); }
  JsonWriter& null();

  template <typename T>
  JsonWriter& value(const std::optional<T>& v) {
    return v ? value(*v) : null();
  }

  // Finished document with trailing newline.
  std::string str() const { return out_ + "\n"; }

 private:
  struct Frame {
    bool array;
    bool empty;
  };
  void before_value();
  void write_string(std::string_view s);
  void newline();

  std::string out_;
  std::vector<Frame> stack_;
  bool after_key_ = false;
};

std::string format_real(double v);

std::string cluster_json(std::string_view name, const RunResult& run, bool timings);
std::string cluster_csv(const RunResult& run);

std::string histogram_json(std::string_view name, const RunResult& run);
std::string histogram_csv(const RunResult& run);

std::string evaluate_json(std::string_view name, const RunResult& run, const EvalReport& eval,
                          OutlierPolicy policy);
std::string evaluate_csv(std::string_view name, const EvalReport& eval);

std::string bench_json(const CorpusReport& report, bool timings);
std::string bench_csv(const CorpusReport& report);

std::string sweep_json(const SweepResult& sweep);
std::string sweep_csv(const SweepResult& sweep);

}  // namespace pfclust
