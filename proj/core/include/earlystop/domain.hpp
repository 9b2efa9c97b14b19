#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <vector>

namespace earlystop {

/// Threshold sentinel meaning "never halt at this timestep". Strictly greater
/// than every confidence under the >= halting comparison; it is never mixed
/// with finite values arithmetically (serialization encodes it as "inf").
inline constexpr double kNeverHalt = std::numeric_limits<double>::infinity();

/// One sample's view of a sequential classifier: the per-timestep confidence
/// score and whether the prefix prediction at each timestep matches the true
/// label. The full-sequence prediction is the entry at the last timestep, so
/// the classifier itself never needs to be represented.
struct SampleTrace {
  std::vector<double> confidences;        // in [0,1], length t_max
  std::vector<std::uint8_t> correctness;  // in {0,1}, length t_max

  std::size_t horizon() const { return confidences.size(); }
  int full_correct() const { return correctness.back(); }
};

/// A calibration or test collection sharing one horizon t_max.
struct TraceSet {
  std::vector<SampleTrace> traces;

  std::size_t size() const { return traces.size(); }
  std::size_t horizon() const { return traces.front().horizon(); }
};

/// Per-timestep halting thresholds; entries lie in [0,1] or are kNeverHalt.
/// A constant vector recovers the single-threshold rule.
using ThresholdVector = std::vector<double>;

/// Calibration parameters shared by both methods.
struct CalibConfig {
  double alpha = 0.10;          // tolerable accuracy gap, in (0,1]; 1 only in validation runs
  double delta = 0.01;          // significance level, in (0,1)
  double grid_delta = 0.01;     // grid resolution; 1/grid_delta must be integral
  double split_fraction = 0.5;  // stage-1 share of the calibration split
  std::uint64_t seed = 0;       // drives the deterministic split shuffle

  void validate() const;  // throws DomainError on a bad field
};

/// Number of grid steps m so that the grid is {0, 1/m, 2/m, ..., 1}.
/// Throws DomainError unless grid_delta is in (0,1) with 1/grid_delta integral.
std::size_t grid_step_count(double grid_delta);

/// The i-th grid value, computed as i/m so that repeated runs agree bit-exactly.
inline double grid_value(std::size_t i, std::size_t m) {
  return static_cast<double>(i) / static_cast<double>(m);
}

/// Gap loss: 1 iff the full-sequence prediction is correct and the early one
/// is not; the negative difference is clipped to zero.
inline int gap_loss(int full_correct, int early_correct) {
  return (full_correct == 1 && early_correct == 0) ? 1 : 0;
}

struct HaltDecision {
  std::size_t time = 0;    // 1-based halt timestep
  bool triggered = false;  // false when only the t_max fallback fired
};

/// First timestep t with confidences[t] >= thresholds[t] (tie halts); falls
/// back to t_max when no finite threshold is crossed, so the rule is total.
/// Throws ValidationError on a length mismatch.
std::size_t halt_time(const SampleTrace& trace, const ThresholdVector& thresholds);

/// halt_time plus whether a threshold actually fired (a fallback halt at
/// t_max is reported with triggered = false).
HaltDecision halt_decision(const SampleTrace& trace, const ThresholdVector& thresholds);

/// Gap loss of the sample under the given stopping rule: full-sequence
/// correctness against correctness at the halt timestep.
int early_loss(const SampleTrace& trace, const ThresholdVector& thresholds);

/// Checks every SampleTrace invariant and a common horizon; throws
/// ValidationError naming the first offending sample and field.
void validate_trace_set(const TraceSet& ts);

/// Checks thresholds are usable against a horizon: length t_max, every entry
/// either in [0,1] or kNeverHalt. Throws ValidationError.
void validate_thresholds(const ThresholdVector& thresholds, std::size_t t_max);

}  // namespace earlystop
