#include "earlystop/domain.hpp"

#include <cmath>
#include <sstream>

#include "earlystop/errors.hpp"

namespace earlystop {

void CalibConfig::validate() const {
  if (!(alpha > 0.0 && alpha <= 1.0))
    throw DomainError("CalibConfig: alpha must lie in (0,1]; 1 is a degenerate bound "
                      "that only validation runs use");
  if (!(delta > 0.0 && delta < 1.0))
    throw DomainError("CalibConfig: delta must lie in (0,1)");
  grid_step_count(grid_delta);
  if (!(split_fraction > 0.0 && split_fraction < 1.0))
    throw DomainError("CalibConfig: split_fraction must lie in (0,1)");
}

std::size_t grid_step_count(double grid_delta) {
  if (!(grid_delta > 0.0 && grid_delta < 1.0))
    throw DomainError("grid_delta must lie in (0,1)");
  const double inv = 1.0 / grid_delta;
  const auto m = static_cast<std::size_t>(std::llround(inv));
  if (m < 2 || std::abs(inv - static_cast<double>(m)) > 1e-6)
    throw DomainError("grid_delta must divide 1 so the grid contains both endpoints");
  return m;
}

namespace {

void check_lengths(const SampleTrace& trace, const ThresholdVector& thresholds) {
  if (trace.horizon() != thresholds.size()) {
    std::ostringstream msg;
    msg << "threshold length " << thresholds.size() << " does not match trace horizon "
        << trace.horizon();
    throw ValidationError(msg.str());
  }
}

}  // namespace

HaltDecision halt_decision(const SampleTrace& trace, const ThresholdVector& thresholds) {
  check_lengths(trace, thresholds);
  const std::size_t t_max = trace.horizon();
  for (std::size_t t = 0; t < t_max; ++t) {
    if (trace.confidences[t] >= thresholds[t]) return {t + 1, true};
  }
  return {t_max, false};
}

std::size_t halt_time(const SampleTrace& trace, const ThresholdVector& thresholds) {
  return halt_decision(trace, thresholds).time;
}

int early_loss(const SampleTrace& trace, const ThresholdVector& thresholds) {
  const std::size_t halt = halt_time(trace, thresholds);
  return gap_loss(trace.full_correct(), trace.correctness[halt - 1]);
}

void validate_trace_set(const TraceSet& ts) {
  if (ts.traces.empty()) throw ValidationError("trace set is empty");
  const std::size_t t_max = ts.traces.front().horizon();
  if (t_max == 0) throw ValidationError("sample 0: horizon must be at least 1");
  for (std::size_t i = 0; i < ts.traces.size(); ++i) {
    const SampleTrace& tr = ts.traces[i];
    std::ostringstream msg;
    msg << "sample " << i << ": ";
    if (tr.confidences.size() != tr.correctness.size()) {
      msg << "confidences length " << tr.confidences.size() << " != correctness length "
          << tr.correctness.size();
      throw ValidationError(msg.str());
    }
    if (tr.horizon() != t_max) {
      msg << "horizon " << tr.horizon() << " differs from shared horizon " << t_max;
      throw ValidationError(msg.str());
    }
    for (std::size_t t = 0; t < t_max; ++t) {
      const double c = tr.confidences[t];
      if (!(c >= 0.0 && c <= 1.0)) {  // also rejects NaN
        msg << "confidence " << c << " at timestep " << (t + 1) << " outside [0,1]";
        throw ValidationError(msg.str());
      }
      if (tr.correctness[t] > 1) {
        msg << "correctness " << int(tr.correctness[t]) << " at timestep " << (t + 1)
            << " not a bit";
        throw ValidationError(msg.str());
      }
    }
  }
}

void validate_thresholds(const ThresholdVector& thresholds, std::size_t t_max) {
  if (thresholds.size() != t_max) {
    std::ostringstream msg;
    msg << "threshold length " << thresholds.size() << " does not match horizon " << t_max;
    throw ValidationError(msg.str());
  }
  for (std::size_t t = 0; t < thresholds.size(); ++t) {
    const double v = thresholds[t];
    if (v == kNeverHalt) continue;
    if (!(v >= 0.0 && v <= 1.0)) {
      std::ostringstream msg;
      msg << "threshold " << v << " at timestep " << (t + 1) << " outside [0,1] and not inf";
      throw ValidationError(msg.str());
    }
  }
}

}  // namespace earlystop
