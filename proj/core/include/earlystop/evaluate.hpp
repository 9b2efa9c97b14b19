#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "earlystop/domain.hpp"

namespace earlystop {

/// Performance of a stopping rule on held-out traces. Indices into the per-t
/// vectors are 0-based for timestep t+1. An accumulated gap is nullopt where
/// no sample has halted yet; it is never conflated with zero.
struct RiskReport {
  std::size_t n = 0;
  std::size_t t_max = 0;

  std::vector<std::size_t> halt_histogram;            // #{tau == t}
  std::vector<std::size_t> accumulated_halts;         // #{tau <= t}, nondecreasing, ends at n
  std::vector<std::optional<double>> accumulated_gap; // loss count / halt count

  double marginal_gap = 0.0;  // equals accumulated_gap at t_max
  double t_avg = 0.0;         // mean of tau / t_max
  double early_accuracy = 0.0;
  double full_accuracy = 0.0;
  double quantile_gap_20 = 0.0;  // gap over the 20% earliest halts
  double quantile_gap_50 = 0.0;  // gap over the 50% earliest halts

  // Halts where no threshold fired and only the t_max fallback applied.
  // Early accuracy counts these like any other halt.
  std::size_t fallback_halts = 0;
};

/// Applies the rule to every trace and aggregates. Quantile gaps cover the
/// ceil(q*n) samples with the smallest halt times, ties broken by input
/// order. Throws on an empty set or malformed thresholds.
RiskReport evaluate_rule(const TraceSet& test, const ThresholdVector& thresholds);

struct GuaranteeCheck {
  bool marginal_violated = false;
  bool conditional_violated = false;
  std::optional<std::size_t> first_violation_t;  // smallest t with a defined gap > alpha
};

/// Empirical check of both guarantees at level alpha. The marginal check is
/// the t_max case of the conditional one, so a marginal violation implies a
/// conditional violation.
GuaranteeCheck guarantee_check(const RiskReport& report, double alpha);

}  // namespace earlystop
