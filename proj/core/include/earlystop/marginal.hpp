#pragma once

#include <cstddef>
#include <vector>

#include "earlystop/domain.hpp"

namespace earlystop {

/// One hypothesis test from the descending threshold scan.
struct MarginalTestRecord {
  double lambda = 0.0;
  std::size_t loss_count = 0;  // integer gap-loss count k
  std::size_t n = 0;
  double p_value = 1.0;
  bool rejected = false;
};

/// Outcome of the marginal calibration. lambda_hat is the smallest grid value
/// whose null was rejected, or kNeverHalt when even lambda = 1 failed.
struct MarginalResult {
  double lambda_hat = kNeverHalt;
  std::vector<MarginalTestRecord> trace_log;  // strictly decreasing lambda, ends
                                              // at the first non-rejection or 0

  /// The constant stopping rule induced by lambda_hat.
  ThresholdVector thresholds(std::size_t t_max) const {
    return ThresholdVector(t_max, lambda_hat);
  }
};

/// Fixed sequence testing over the grid, from lambda = 1 downward: at each
/// grid value the empirical gap-loss count over the whole calibration set is
/// turned into a binomial p-value, and the scan stops at the first value
/// above delta. Family-wise error stays below delta, so the returned
/// threshold controls the marginal accuracy gap at level alpha with
/// probability at least 1 - delta over calibration draws.
MarginalResult calibrate_marginal(const TraceSet& cal, const CalibConfig& cfg);

/// Mean gap loss over the whole set (the empirical marginal accuracy gap).
/// Throws DomainError on an empty set.
double empirical_marginal_gap(const TraceSet& ts, const ThresholdVector& thresholds);

}  // namespace earlystop
