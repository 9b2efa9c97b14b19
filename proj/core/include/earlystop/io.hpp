#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "earlystop/conditional.hpp"
#include "earlystop/domain.hpp"
#include "earlystop/evaluate.hpp"
#include "earlystop/marginal.hpp"
#include "earlystop/synth.hpp"

namespace earlystop {

// ---- trace files -----------------------------------------------------------
// Long-format CSV with header `sample_id,t,confidence,correct`; every sample
// carries one row per timestep, t running 1..t_max.

/// Parses a trace file; sample order follows first appearance. Throws
/// ParseError naming the line (or sample) on duplicates, missing timesteps,
/// or out-of-range values.
TraceSet parse_traces(std::istream& in, std::string_view source_name);
TraceSet parse_traces(const std::filesystem::path& path);

/// Writes the long-format CSV with generated ids s1..sN. Confidences are
/// printed with shortest round-trip precision.
void write_traces(std::ostream& out, const TraceSet& ts);

// ---- threshold files -------------------------------------------------------

/// On-disk form of a calibrated rule plus the settings that produced it.
/// kNeverHalt entries are encoded as the literal string "inf"; everything
/// else round-trips at full precision.
struct ThresholdFile {
  std::size_t t_max = 0;
  double grid_delta = 0.0;
  double alpha = 0.0;
  double delta = 0.0;
  std::string mode;  // "marginal" or "conditional"
  ThresholdVector thresholds;
  // provenance
  std::uint64_t seed = 0;
  std::vector<std::size_t> split_sizes;  // {n} for marginal, {n1, n2} for conditional
  std::string tool_version;
};

std::string threshold_file_to_json(const ThresholdFile& tf);
ThresholdFile threshold_file_from_json(const std::string& text, std::string_view source_name);
ThresholdFile read_threshold_file(const std::filesystem::path& path);
void write_threshold_file(const std::filesystem::path& path, const ThresholdFile& tf);

// ---- report documents ------------------------------------------------------

std::string risk_report_to_json(const RiskReport& report);
std::string marginal_log_to_json(const MarginalResult& result);
std::string conditional_log_to_json(const ConditionalResult& result);
std::string mc_report_to_json(const MCReport& report, std::string_view mode,
                              const CalibConfig& cfg, std::size_t test_pool_size);

// ---- generator parameter files ---------------------------------------------

GenParams gen_params_from_json(const std::string& text, std::string_view source_name);
GenParams read_gen_params(const std::filesystem::path& path);
std::string gen_params_to_json(const GenParams& params);

// ---- file helpers ----------------------------------------------------------

/// Writes through a temporary sibling and renames, so a failure never leaves
/// a partial file at `path`.
void write_text_file_atomic(const std::filesystem::path& path, std::string_view content);

std::string read_text_file(const std::filesystem::path& path);

}  // namespace earlystop
