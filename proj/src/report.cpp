#include "pfclust/report.hpp"

#include <cmath>
#include <fmt/format.h>

#include "pfclust/errors.hpp"

namespace pfclust {
namespace {

void run_summary(JsonWriter& w, const RunResult& run) {
  w.key("n").value(run.n);
  w.key("dimension").value(run.dimension);
  w.key("bins").value(run.bins);
  w.key("sigma_d").value(run.sigma);
  w.key("selected_bin").value(run.selected_bin);
  w.key("threshold").value(run.threshold);
  w.key("detected_clusters").value(run.detected_count);
  w.key("initial_cluster_count").value(run.initial_count);
  w.key("outlier_count").value(run.outlier_count);
  w.key("k_estimate").value(run.k_estimate);
  w.key("k_estimate_defaulted").value(run.k_defaulted);
  w.key("accepted").value(run.accepted);
  if (run.final_count) {
    w.key("final_cluster_count").value(*run.final_count);
  } else {
    w.key("final_cluster_count").value("na");
  }
  w.key("cost_before").value(run.cost_before);
  w.key("cost_after").value(run.cost_after);
  w.key("degenerate").value(to_string(run.degeneracy));
}

void timings_object(JsonWriter& w, const StageTimings& t) {
  w.begin_object();
  w.key("normalize").value(t.normalize_ms);
  w.key("matrices").value(t.matrices_ms);
  w.key("detect").value(t.detect_ms);
  w.key("merge").value(t.merge_ms);
  w.key("total").value(t.total_ms());
  w.end_object();
}

void eval_members(JsonWriter& w, const EvalReport& eval, bool indices) {
  if (indices) {
    w.key("ari").value(eval.ari);
    w.key("jaccard").value(eval.jaccard);
    w.key("f1").value(eval.f1);
  }
  if (eval.predicted_k) {
    w.key("predicted_k").value(*eval.predicted_k);
  } else {
    w.key("predicted_k").value("na");
  }
  w.key("truth_k").value(eval.truth_k);
  w.key("exact_match").value(eval.exact_match);
}

std::string count_or_na(const std::optional<std::size_t>& k) {
  return k ? std::to_string(*k) : std::string("na");
}

std::string csv_field(std::string_view s) {
  if (s.find_first_of(",\"\n") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

OutputFormat parse_output_format(std::string_view text) {
  if (text == "json") return OutputFormat::kJson;
  if (text == "csv") return OutputFormat::kCsv;
  throw IngestError(fmt::format("unknown output format '{}'", text));
}

std::string format_real(double v) { return fmt::format("{:.6f}", v); }

void JsonWriter::newline() {
  out_ += '\n';
  out_.append(2 * stack_.size(), ' ');
}

void JsonWriter::before_value() {
  if (after_key_) {
    after_key_ = false;
    return;
  }
  if (stack_.empty()) return;
  Frame& top = stack_.back();
  if (!top.empty) out_ += top.array ? ", " : ",";
  top.empty = false;
}

JsonWriter& JsonWriter::begin_object() {
  before_value();
  out_ += '{';
  stack_.push_back({false, true});
  return *this;
}

JsonWriter& JsonWriter::end_object() {
  const bool was_empty = stack_.back().empty;
  stack_.pop_back();
  if (!was_empty) newline();
  out_ += '}';
  return *this;
}

JsonWriter& JsonWriter::begin_array() {
  before_value();
  out_ += '[';
  stack_.push_back({true, true});
  return *this;
}

JsonWriter& JsonWriter::end_array() {
  stack_.pop_back();
  out_ += ']';
  return *this;
}

JsonWriter& JsonWriter::key(std::string_view name) {
  Frame& top = stack_.back();
  if (!top.empty) out_ += ',';
  top.empty = false;
  newline();
  write_string(name);
  out_ += ": ";
  after_key_ = true;
  return *this;
}

JsonWriter& JsonWriter::value(std::string_view s) {
  before_value();
  write_string(s);
  return *this;
}

void JsonWriter::write_string(std::string_view s) {
  out_ += '"';
  for (char c : s) {
    switch (c) {
      case '"':
        out_ += "\\\"";
        break;
      case '\\':
        out_ += "\\\\";
        break;
      case '\n':
        out_ += "\\n";
        break;
      case '\t':
        out_ += "\\t";
        break;
      case '\r':
        out_ += "\\r";
        break;
      default:
        if (static_cast<unsigned char>(c) < 0x20) {
          out_ += fmt::format("\\u{:04x}", static_cast<int>(c));
        } else {
          out_ += c;
        }
    }
  }
  out_ += '"';
}

JsonWriter& JsonWriter::value(bool b) {
  before_value();
  out_ += b ? "true" : "false";
  return *this;
}

JsonWriter& JsonWriter::value(double v) {
  if (!std::isfinite(v)) return null();
  before_value();
  out_ += format_real(v);
  return *this;
}

JsonWriter& JsonWriter::value(std::int64_t v) {
  before_value();
  out_ += std::to_string(v);
  return *this;
}

JsonWriter& JsonWriter::value(std::uint64_t v) {
  before_value();
  out_ += std::to_string(v);
  return *this;
}

JsonWriter& JsonWriter::null() {
  before_value();
  out_ += "null";
  return *this;
}

std::string cluster_json(std::string_view name, const RunResult& run, bool timings) {
  JsonWriter w;
  w.begin_object();
  w.key("schema_version").value(kSchemaVersion);
  w.key("command").value("cluster");
  w.key("dataset").value(name);
  run_summary(w, run);
  w.key("merge_steps").begin_array();
  for (const auto& s : run.merge_steps) {
    w.begin_array().value(s.a).value(s.b).value(s.distance).end_array();
  }
  w.end_array();
  w.key("assignment").begin_array();
  for (int c : run.assignment) w.value(c);
  w.end_array();
  if (timings) {
    w.key("timings_ms");
    timings_object(w, run.timings);
  }
  w.end_object();
  return w.str();
}

std::string cluster_csv(const RunResult& run) {
  std::string out = fmt::format("# schema_version={}\npoint,cluster\n", kSchemaVersion);
  for (std::size_t i = 0; i < run.assignment.size(); ++i) {
    out += fmt::format("{},{}\n", i + 1, run.assignment[i]);
  }
  return out;
}

std::string histogram_json(std::string_view name, const RunResult& run) {
  JsonWriter w;
  w.begin_object();
  w.key("schema_version").value(kSchemaVersion);
  w.key("command").value("histogram");
  w.key("dataset").value(name);
  w.key("n").value(run.n);
  w.key("bins").value(run.bins);
  w.key("sigma_d").value(run.sigma);
  w.key("selected_bin").value(run.selected_bin);
  w.key("threshold").value(run.threshold);
  w.key("counts").begin_array();
  for (auto c : run.histogram) w.value(c);
  w.end_array();
  w.key("degenerate").value(to_string(run.degeneracy));
  w.end_object();
  return w.str();
}

std::string histogram_csv(const RunResult& run) {
  std::string out = fmt::format(
      "# schema_version={} bins={} selected_bin={} threshold={}\n"
      "bin,lower,upper,count,selected\n",
      kSchemaVersion, run.bins, run.selected_bin, format_real(run.threshold));
  const double width = 1.0 / static_cast<double>(run.bins);
  for (std::size_t b = 0; b < run.histogram.size(); ++b) {
    out += fmt::format("{},{},{},{},{}\n", b + 1, format_real(static_cast<double>(b) * width),
                       format_real(static_cast<double>(b + 1) * width), run.histogram[b],
                       static_cast<int>(b + 1) == run.selected_bin ? 1 : 0);
  }
  return out;
}

std::string evaluate_json(std::string_view name, const RunResult& run, const EvalReport& eval,
                          OutlierPolicy policy) {
  JsonWriter w;
  w.begin_object();
  w.key("schema_version").value(kSchemaVersion);
  w.key("command").value("evaluate");
  w.key("dataset").value(name);
  w.key("outlier_policy").value(to_string(policy));
  eval_members(w, eval, true);
  w.key("outlier_count").value(run.outlier_count);
  w.key("threshold").value(run.threshold);
  w.end_object();
  return w.str();
}

std::string evaluate_csv(std::string_view name, const EvalReport& eval) {
  return fmt::format(
      "# schema_version={}\ndataset,ari,jaccard,f1,predicted_k,truth_k,exact_match\n"
      "{},{},{},{},{},{},{}\n",
      kSchemaVersion, csv_field(name), format_real(eval.ari), format_real(eval.jaccard),
      format_real(eval.f1), count_or_na(eval.predicted_k), eval.truth_k,
      eval.exact_match ? 1 : 0);
}

std::string bench_json(const CorpusReport& report, bool timings) {
  JsonWriter w;
  w.begin_object();
  w.key("schema_version").value(kSchemaVersion);
  w.key("command").value("bench");
  w.key("bins").value(report.bins);
  w.key("outlier_policy").value(to_string(report.policy));
  w.key("datasets").begin_array();
  for (const auto& e : report.entries) {
    w.begin_object();
    w.key("name").value(e.name);
    w.key("status").value(to_string(e.status));
    if (!e.message.empty()) w.key("message").value(e.message);
    w.key("truth_k").value(e.truth_k);
    if (e.run) {
      run_summary(w, *e.run);
      if (timings) {
        w.key("timings_ms");
        timings_object(w, e.run->timings);
      }
    }
    if (e.eval) {
      w.key("evaluation").begin_object();
      eval_members(w, *e.eval, e.has_labels);
      w.end_object();
    }
    w.end_object();
  }
  w.end_array();
  w.key("evaluated").value(report.evaluated);
  w.key("matches").value(report.matches);
  w.key("accuracy_percent").value(report.accuracy);
  if (timings) w.key("wall_ms").value(report.wall_ms);
  w.end_object();
  return w.str();
}

std::string bench_csv(const CorpusReport& report) {
  std::string out = fmt::format(
      "# schema_version={} bins={} outlier_policy={}\n"
      "dataset,status,n,threshold,initial_clusters,outliers,k_estimate,accepted,"
      "final_k,truth_k,exact_match,ari,jaccard,f1\n",
      kSchemaVersion, report.bins, to_string(report.policy));
  for (const auto& e : report.entries) {
    std::string run_cols = ",,,,,,";
    if (e.run) {
      const auto& r = *e.run;
      run_cols = fmt::format("{},{},{},{},{},{},{}", r.n, format_real(r.threshold),
                             r.initial_count, r.outlier_count, r.k_estimate, r.accepted ? 1 : 0,
                             count_or_na(r.final_count));
    }
    std::string eval_cols = ",,,";
    if (e.eval) {
      eval_cols = fmt::format("{},", e.eval->exact_match ? 1 : 0);
      eval_cols += e.has_labels ? fmt::format("{},{},{}", format_real(e.eval->ari),
                                              format_real(e.eval->jaccard),
                                              format_real(e.eval->f1))
                                : std::string(",,");
    }
    out += fmt::format("{},{},{},{},{}\n", csv_field(e.name), to_string(e.status), run_cols,
                       e.truth_k, eval_cols);
  }
  out += fmt::format("# evaluated={} matches={} accuracy_percent={}\n", report.evaluated,
                     report.matches, report.accuracy ? format_real(*report.accuracy) : "na");
  return out;
}

std::string sweep_json(const SweepResult& sweep) {
  JsonWriter w;
  w.begin_object();
  w.key("schema_version").value(kSchemaVersion);
  w.key("command").value("sweep-bins");
  w.key("runs").begin_array();
  for (const auto& r : sweep.rows) {
    w.begin_array().value(r.dataset).value(r.bins).value(to_string(r.status));
    if (r.predicted_k) {
      w.value(*r.predicted_k);
    } else {
      w.value("na");
    }
    w.value(r.truth_k).value(r.exact_match).end_array();
  }
  w.end_array();
  w.key("accuracy").begin_array();
  for (const auto& p : sweep.curve) w.begin_array().value(p.bins).value(p.accuracy).end_array();
  w.end_array();
  w.end_object();
  return w.str();
}

std::string sweep_csv(const SweepResult& sweep) {
  std::string out = fmt::format(
      "# schema_version={}\nkind,dataset,bins,status,predicted_k,truth_k,exact_match,"
      "accuracy_percent\n",
      kSchemaVersion);
  for (const auto& r : sweep.rows) {
    out += fmt::format("run,{},{},{},{},{},{},\n", csv_field(r.dataset), r.bins,
                       to_string(r.status), count_or_na(r.predicted_k), r.truth_k,
                       r.exact_match ? 1 : 0);
  }
  for (const auto& p : sweep.curve) {
    out += fmt::format("accuracy,,{},,,,,{}\n", p.bins,
                       p.accuracy ? format_real(*p.accuracy) : "na");
  }
  return out;
}

}  // namespace pfclust
