#include "earlystop/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <optional>
#include <sstream>
#include <unordered_map>

#include <nlohmann/json.hpp>

#include "earlystop/errors.hpp"
#include "earlystop/version.hpp"

namespace earlystop {

using json = nlohmann::ordered_json;

namespace {

// Guards the per-sample row buffer against a corrupt timestep field.
constexpr std::size_t kMaxTimesteps = 1000000;

[[noreturn]] void parse_fail(std::string_view source, std::size_t line, const std::string& what) {
  std::ostringstream msg;
  msg << source << ":" << line << ": " << what;
  throw ParseError(msg.str());
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
  return fields;
}

template <typename T>
std::optional<T> parse_number(std::string_view field) {
  T value{};
  const char* first = field.data();
  const char* last = field.data() + field.size();
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr != last) return std::nullopt;
  return value;
}

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

}  // namespace

TraceSet parse_traces(std::istream& in, std::string_view source_name) {
  struct PendingSample {
    std::size_t first_line = 0;
    std::vector<std::optional<std::pair<double, std::uint8_t>>> rows;  // index t-1
  };

  std::string line;
  std::size_t line_no = 0;

  if (!std::getline(in, line)) parse_fail(source_name, 1, "empty file");
  ++line_no;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "sample_id,t,confidence,correct")
    parse_fail(source_name, line_no, "expected header `sample_id,t,confidence,correct`");

  std::vector<std::string> order;
  std::unordered_map<std::string, PendingSample> samples;
  std::size_t t_max = 0;

  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;

    const auto fields = split_fields(line);
    if (fields.size() != 4) parse_fail(source_name, line_no, "expected 4 comma-separated fields");

    const std::string id(fields[0]);
    if (id.empty()) parse_fail(source_name, line_no, "empty sample_id");

    const auto t = parse_number<std::size_t>(fields[1]);
    if (!t || *t < 1) parse_fail(source_name, line_no, "t must be a positive integer");
    if (*t > kMaxTimesteps)
      parse_fail(source_name, line_no, "t exceeds the supported horizon of 1000000");

    const auto confidence = parse_number<double>(fields[2]);
    if (!confidence) parse_fail(source_name, line_no, "confidence is not a decimal number");
    if (!(*confidence >= 0.0 && *confidence <= 1.0))
      parse_fail(source_name, line_no, "confidence " + std::string(fields[2]) + " outside [0,1]");

    const auto correct = parse_number<int>(fields[3]);
    if (!correct || (*correct != 0 && *correct != 1))
      parse_fail(source_name, line_no, "correct must be 0 or 1");

    auto [it, inserted] = samples.try_emplace(id);
    if (inserted) {
      it->second.first_line = line_no;
      order.push_back(id);
    }
    PendingSample& sample = it->second;
    if (sample.rows.size() < *t) sample.rows.resize(*t);
    if (sample.rows[*t - 1].has_value()) {
      std::ostringstream msg;
      msg << "duplicate row for (" << id << ", t=" << *t << ")";
      parse_fail(source_name, line_no, msg.str());
    }
    sample.rows[*t - 1] = {*confidence, static_cast<std::uint8_t>(*correct)};
    t_max = std::max(t_max, *t);
  }

  if (order.empty()) parse_fail(source_name, line_no, "no data rows");

  TraceSet out;
  out.traces.reserve(order.size());
  for (const std::string& id : order) {
    const PendingSample& sample = samples.at(id);
    SampleTrace trace;
    trace.confidences.reserve(t_max);
    trace.correctness.reserve(t_max);
    for (std::size_t t = 1; t <= t_max; ++t) {
      if (t > sample.rows.size() || !sample.rows[t - 1].has_value()) {
        std::ostringstream msg;
        msg << "sample `" << id << "` is missing timestep " << t << " (t_max is " << t_max << ")";
        parse_fail(source_name, sample.first_line, msg.str());
      }
      trace.confidences.push_back(sample.rows[t - 1]->first);
      trace.correctness.push_back(sample.rows[t - 1]->second);
    }
    out.traces.push_back(std::move(trace));
  }
  validate_trace_set(out);
  return out;
}

TraceSet parse_traces(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open trace file: " + path.string());
  return parse_traces(in, path.string());
}

void write_traces(std::ostream& out, const TraceSet& ts) {
  validate_trace_set(ts);
  out << "sample_id,t,confidence,correct\n";
  for (std::size_t i = 0; i < ts.size(); ++i) {
    const SampleTrace& trace = ts.traces[i];
    for (std::size_t t = 1; t <= trace.horizon(); ++t) {
      out << 's' << (i + 1) << ',' << t << ',' << format_double(trace.confidences[t - 1]) << ','
          << int(trace.correctness[t - 1]) << '\n';
    }
  }
}

// ---- threshold files -------------------------------------------------------

namespace {

json thresholds_to_json(const ThresholdVector& thresholds) {
  json arr = json::array();
  for (const double v : thresholds) {
    if (v == kNeverHalt)
      arr.push_back("inf");
    else
      arr.push_back(v);
  }
  return arr;
}

ThresholdVector thresholds_from_json(const json& arr, std::string_view source) {
  if (!arr.is_array()) throw ParseError(std::string(source) + ": `thresholds` must be an array");
  ThresholdVector out;
  out.reserve(arr.size());
  for (const auto& item : arr) {
    if (item.is_string()) {
      if (item.get<std::string>() != "inf")
        throw ParseError(std::string(source) +
                         ": the only non-numeric threshold entry allowed is \"inf\"");
      out.push_back(kNeverHalt);
    } else if (item.is_number()) {
      const double v = item.get<double>();
      if (!(v >= 0.0 && v <= 1.0))
        throw ParseError(std::string(source) + ": threshold " + format_double(v) +
                         " outside [0,1]");
      out.push_back(v);
    } else {
      throw ParseError(std::string(source) + ": threshold entries must be numbers or \"inf\"");
    }
  }
  return out;
}

}  // namespace

std::string threshold_file_to_json(const ThresholdFile& tf) {
  json doc;
  doc["t_max"] = tf.t_max;
  doc["grid_delta"] = tf.grid_delta;
  doc["alpha"] = tf.alpha;
  doc["delta"] = tf.delta;
  doc["mode"] = tf.mode;
  doc["thresholds"] = thresholds_to_json(tf.thresholds);
  doc["provenance"] = {
      {"seed", tf.seed}, {"split_sizes", tf.split_sizes}, {"tool_version", tf.tool_version}};
  return doc.dump(2) + "\n";
}

ThresholdFile threshold_file_from_json(const std::string& text, std::string_view source_name) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw ParseError(std::string(source_name) + ": " + e.what());
  }
  try {
    ThresholdFile tf;
    tf.t_max = doc.at("t_max").get<std::size_t>();
    tf.grid_delta = doc.at("grid_delta").get<double>();
    tf.alpha = doc.at("alpha").get<double>();
    tf.delta = doc.at("delta").get<double>();
    tf.mode = doc.at("mode").get<std::string>();
    tf.thresholds = thresholds_from_json(doc.at("thresholds"), source_name);
    const json& prov = doc.at("provenance");
    tf.seed = prov.at("seed").get<std::uint64_t>();
    tf.split_sizes = prov.at("split_sizes").get<std::vector<std::size_t>>();
    tf.tool_version = prov.at("tool_version").get<std::string>();
    if (tf.mode != "marginal" && tf.mode != "conditional")
      throw ParseError(std::string(source_name) + ": mode must be `marginal` or `conditional`");
    if (tf.thresholds.size() != tf.t_max)
      throw ParseError(std::string(source_name) + ": thresholds length does not equal t_max");
    return tf;
  } catch (const json::exception& e) {
    throw ParseError(std::string(source_name) + ": " + e.what());
  }
}

ThresholdFile read_threshold_file(const std::filesystem::path& path) {
  return threshold_file_from_json(read_text_file(path), path.string());
}

void write_threshold_file(const std::filesystem::path& path, const ThresholdFile& tf) {
  write_text_file_atomic(path, threshold_file_to_json(tf));
}

// ---- report documents ------------------------------------------------------

std::string risk_report_to_json(const RiskReport& report) {
  json doc;
  doc["n"] = report.n;
  doc["t_max"] = report.t_max;
  json per_t = json::array();
  for (std::size_t t = 0; t < report.t_max; ++t) {
    json row;
    row["t"] = t + 1;
    row["halts"] = report.halt_histogram[t];
    row["accumulated_halts"] = report.accumulated_halts[t];
    if (report.accumulated_gap[t])
      row["accumulated_gap"] = *report.accumulated_gap[t];
    else
      row["accumulated_gap"] = nullptr;  // undefined is not zero
    per_t.push_back(std::move(row));
  }
  doc["per_timestep"] = std::move(per_t);
  doc["marginal_gap"] = report.marginal_gap;
  doc["t_avg"] = report.t_avg;
  doc["early_accuracy"] = report.early_accuracy;
  doc["full_accuracy"] = report.full_accuracy;
  doc["quantile_gaps"] = {{"q20", report.quantile_gap_20}, {"q50", report.quantile_gap_50}};
  doc["meta"] = {{"fallback_halts", report.fallback_halts},
                 {"early_accuracy_includes_fallback_halts", true},
                 {"tool_version", std::string(kVersion)}};
  return doc.dump(2) + "\n";
}

std::string marginal_log_to_json(const MarginalResult& result) {
  json doc;
  if (result.lambda_hat == kNeverHalt)
    doc["lambda_hat"] = "inf";
  else
    doc["lambda_hat"] = result.lambda_hat;
  json log = json::array();
  for (const MarginalTestRecord& rec : result.trace_log) {
    log.push_back({{"lambda", rec.lambda},
                   {"loss_count", rec.loss_count},
                   {"n", rec.n},
                   {"p_value", rec.p_value},
                   {"rejected", rec.rejected}});
  }
  doc["tests"] = std::move(log);
  return doc.dump(2) + "\n";
}

std::string conditional_log_to_json(const ConditionalResult& result) {
  json doc;
  doc["eta_hat"] = thresholds_to_json(result.eta_hat);
  doc["lambda_hat"] = thresholds_to_json(result.lambda_hat);
  doc["t_star"] = result.t_star;
  json log = json::array();
  for (const OuterTestRecord& rec : result.test_log) {
    json entry;
    entry["t"] = rec.t;
    json finer = json::array();
    for (const FinerTestRecord& f : rec.finer) {
      finer.push_back({{"t_prime", f.t_prime},
                       {"halted", f.halted},
                       {"loss_count", f.loss_count},
                       {"p_value", f.p_value}});
    }
    entry["finer"] = std::move(finer);
    switch (rec.break_reason) {
      case BreakReason::none:
        entry["break"] = nullptr;
        break;
      case BreakReason::empty_halt_set:
        entry["break"] = {{"reason", "empty_halt_set"}, {"t_prime", rec.break_t_prime}};
        break;
      case BreakReason::p_above_delta:
        entry["break"] = {{"reason", "p_above_delta"}, {"t_prime", rec.break_t_prime}};
        break;
    }
    log.push_back(std::move(entry));
  }
  doc["tests"] = std::move(log);
  doc["stage1_indices"] = result.stage1_indices;
  doc["stage2_indices"] = result.stage2_indices;
  return doc.dump(2) + "\n";
}

std::string mc_report_to_json(const MCReport& report, std::string_view mode,
                              const CalibConfig& cfg, std::size_t test_pool_size) {
  json doc;
  doc["mode"] = std::string(mode);
  doc["alpha"] = cfg.alpha;
  doc["delta"] = cfg.delta;
  doc["grid_delta"] = cfg.grid_delta;
  doc["trials"] = report.trials;
  doc["test_pool_size"] = test_pool_size;
  doc["marginal_violation_rate"] = report.marginal_violation_rate;
  doc["marginal_rate_ci95"] = {report.marginal_rate_ci.first, report.marginal_rate_ci.second};
  doc["conditional_violation_rate"] = report.conditional_violation_rate;
  doc["conditional_rate_ci95"] = {report.conditional_rate_ci.first,
                                  report.conditional_rate_ci.second};
  doc["power"] = report.power;
  json per_t = json::array();
  for (std::size_t t = 0; t < report.mean_accumulated_gap.size(); ++t) {
    json row;
    row["t"] = t + 1;
    row["defined_trials"] = report.gap_defined_trials[t];
    if (report.gap_defined_trials[t] > 0)
      row["mean_accumulated_gap"] = report.mean_accumulated_gap[t];
    else
      row["mean_accumulated_gap"] = nullptr;
    per_t.push_back(std::move(row));
  }
  doc["per_timestep"] = std::move(per_t);
  json trials = json::array();
  for (const MCTrial& rec : report.trial_records) {
    trials.push_back({{"marginal_violated", rec.marginal_violated},
                      {"conditional_violated", rec.conditional_violated},
                      {"nontrivial", rec.nontrivial},
                      {"t_star", rec.t_star},
                      {"t_avg", rec.t_avg}});
  }
  doc["trial_records"] = std::move(trials);
  return doc.dump(2) + "\n";
}

// ---- generator parameter files ---------------------------------------------

GenParams gen_params_from_json(const std::string& text, std::string_view source_name) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw ParseError(std::string(source_name) + ": " + e.what());
  }
  try {
    GenParams params;
    params.t_max = doc.at("t_max").get<std::size_t>();
    params.n = doc.at("n").get<std::size_t>();
    const std::string law = doc.at("reveal_law").get<std::string>();
    if (law == "uniform") {
      params.reveal_law = RevealLaw::uniform;
    } else if (law == "geometric") {
      params.reveal_law = RevealLaw::geometric;
      params.geometric_g = doc.at("geometric_g").get<double>();
    } else {
      throw ParseError(std::string(source_name) +
                       ": reveal_law must be `uniform` or `geometric`");
    }
    params.p_pre = doc.at("p_pre").get<double>();
    params.p_post = doc.at("p_post").get<double>();
    params.c_low = doc.at("c_low").get<double>();
    params.c_mid = doc.at("c_mid").get<double>();
    if (doc.contains("seed")) params.seed = doc.at("seed").get<std::uint64_t>();
    params.validate();
    return params;
  } catch (const json::exception& e) {
    throw ParseError(std::string(source_name) + ": " + e.what());
  }
}

GenParams read_gen_params(const std::filesystem::path& path) {
  return gen_params_from_json(read_text_file(path), path.string());
}

std::string gen_params_to_json(const GenParams& params) {
  json doc;
  doc["t_max"] = params.t_max;
  doc["n"] = params.n;
  doc["reveal_law"] = params.reveal_law == RevealLaw::uniform ? "uniform" : "geometric";
  if (params.reveal_law == RevealLaw::geometric) doc["geometric_g"] = params.geometric_g;
  doc["p_pre"] = params.p_pre;
  doc["p_post"] = params.p_post;
  doc["c_low"] = params.c_low;
  doc["c_mid"] = params.c_mid;
  doc["seed"] = params.seed;
  return doc.dump(2) + "\n";
}

// ---- file helpers ----------------------------------------------------------

void write_text_file_atomic(const std::filesystem::path& path, std::string_view content) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open for writing: " + tmp.string());
    out << content;
    out.flush();
    if (!out) {
      std::error_code ec;
      std::filesystem::remove(tmp, ec);
      throw Error("failed while writing: " + tmp.string());
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw Error("cannot move " + tmp.string() + " into place");
  }
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open: " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace earlystop
