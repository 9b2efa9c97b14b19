#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "earlystop/domain.hpp"

namespace earlystop {

/// One finer-null test inside an outer iteration: the samples halting by
/// t_prime, their gap-loss count, and the resulting binomial p-value.
struct FinerTestRecord {
  std::size_t t_prime = 0;
  std::size_t halted = 0;      // |I|
  std::size_t loss_count = 0;  // k
  double p_value = 1.0;
};

enum class BreakReason {
  none,             // every finer null up to t_max was rejected
  empty_halt_set,   // no sample halts by some t'; no evidence either way
  p_above_delta,    // a finer p-value failed the delta comparison
};

struct OuterTestRecord {
  std::size_t t = 0;  // the suffix configuration lambda^t under test
  std::vector<FinerTestRecord> finer;
  BreakReason break_reason = BreakReason::none;
  std::size_t break_t_prime = 0;  // meaningful when break_reason != none
};

/// Outcome of the two-stage conditional calibration. lambda_hat always has
/// suffix structure: entries equal eta_hat from t_star onward and kNeverHalt
/// before it; t_star == t_max + 1 encodes the all-infinity fallback rule.
struct ConditionalResult {
  ThresholdVector eta_hat;     // stage-1 candidate
  ThresholdVector lambda_hat;  // stage-2 certified rule
  std::size_t t_star = 0;
  std::vector<OuterTestRecord> test_log;
  // Split membership (indices into the pre-shuffle calibration order),
  // persisted so a run can be reproduced stage by stage. Empty when the
  // stages were invoked directly on pre-split data.
  std::vector<std::size_t> stage1_indices;
  std::vector<std::size_t> stage2_indices;
};

/// Empirical accumulated accuracy gap: mean gap loss over the samples with
/// halt time <= t. Returns nullopt when no sample halts by t (the risk is
/// undefined there, which is distinct from being zero).
/// Throws DomainError when t is outside {1, ..., t_max}.
std::optional<double> accumulated_gap(const TraceSet& ts, const ThresholdVector& thresholds,
                                      std::size_t t);

/// Stage 1, candidate screening: greedily sets eta_t to the lowest grid value
/// whose accumulated gap at t stays within alpha, holding earlier entries
/// fixed and later ones at kNeverHalt. An entry stays kNeverHalt when the
/// halt set empties or no grid value qualifies. Heuristic by construction;
/// stage 2 supplies the statistical guarantee.
ThresholdVector screen_candidates(const TraceSet& cal1, const CalibConfig& cfg);

/// The suffix configuration lambda^t: eta_hat from position t onward,
/// kNeverHalt before. t is 1-based; t == 1 returns eta_hat unchanged.
ThresholdVector suffix_config(const ThresholdVector& eta_hat, std::size_t t);

/// Stage 2, fixed sequence testing over suffix configurations from
/// lambda^{t_max} down to lambda^1. Each configuration is accepted only if
/// every finer null at t' = t..t_max yields a binomial p-value <= delta; an
/// empty halt set or a failing p-value stops all testing, and the last
/// accepted configuration is returned.
ConditionalResult test_candidates(const TraceSet& cal2, const ThresholdVector& eta_hat,
                                  const CalibConfig& cfg);

/// Full conditional calibration: shuffle by cfg.seed, split by
/// cfg.split_fraction (stage-1 size = floor(fraction * n)), then screen on
/// the first part and test on the second. Throws DomainError when either
/// part would be empty.
ConditionalResult calibrate_conditional(const TraceSet& cal, const CalibConfig& cfg);

/// The two stages on an explicit split, bypassing the shuffle. Used by
/// calibrate_conditional and directly testable with hand-picked splits.
ConditionalResult calibrate_conditional_presplit(const TraceSet& cal1, const TraceSet& cal2,
                                                 const CalibConfig& cfg);

}  // namespace earlystop
