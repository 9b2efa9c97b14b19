#pragma once

// Independent oracles for the calibration algorithms. Halt times and losses
// are recomputed here with their own loops (nothing from the domain module's
// stopping-rule path), so a bug there cannot cancel against the same bug in
// a calibrator.

#include <cstddef>
#include <limits>
#include <vector>

#include "earlystop/binomial.hpp"
#include "earlystop/domain.hpp"

namespace estest {

inline std::size_t oracle_halt(const earlystop::SampleTrace& trace,
                               const earlystop::ThresholdVector& thresholds) {
  const std::size_t t_max = trace.confidences.size();
  std::size_t halt = t_max;
  for (std::size_t t = t_max; t-- > 0;) {
    if (trace.confidences[t] >= thresholds[t]) halt = t + 1;
  }
  return halt;
}

inline int oracle_loss(const earlystop::SampleTrace& trace,
                       const earlystop::ThresholdVector& thresholds) {
  const std::size_t halt = oracle_halt(trace, thresholds);
  const int full = trace.correctness.back();
  const int early = trace.correctness[halt - 1];
  const int diff = full - early;
  return diff > 0 ? diff : 0;
}

// Exhaustive-scan marginal oracle: compute the p-value at every grid point,
// then take min{lambda : p(lambda') <= delta for all grid lambda' >= lambda},
// or infinity when there is none.
inline double oracle_marginal_lambda(const earlystop::TraceSet& cal,
                                     const earlystop::CalibConfig& cfg) {
  const std::size_t m = earlystop::grid_step_count(cfg.grid_delta);
  const std::size_t t_max = cal.horizon();
  std::vector<double> p_values(m + 1);
  for (std::size_t i = 0; i <= m; ++i) {
    const earlystop::ThresholdVector thresholds(t_max, earlystop::grid_value(i, m));
    std::size_t losses = 0;
    for (const auto& trace : cal.traces) losses += static_cast<std::size_t>(oracle_loss(trace, thresholds));
    p_values[i] = earlystop::binom_cdf(losses, cal.size(), cfg.alpha);
  }
  double lambda_hat = earlystop::kNeverHalt;
  for (std::size_t i = m + 1; i-- > 0;) {
    if (p_values[i] > cfg.delta) break;
    lambda_hat = earlystop::grid_value(i, m);
  }
  return lambda_hat;
}

// Stage-2 oracle. pass(t) evaluates the inner loop for the suffix
// configuration lambda^t in isolation; the outer result only depends on the
// maximal all-pass suffix of {pass(t)}.
inline bool oracle_pass(const earlystop::TraceSet& cal2, const earlystop::ThresholdVector& eta,
                        std::size_t t, const earlystop::CalibConfig& cfg) {
  const std::size_t t_max = cal2.horizon();
  earlystop::ThresholdVector lambda(t_max, earlystop::kNeverHalt);
  for (std::size_t i = t - 1; i < t_max; ++i) lambda[i] = eta[i];
  for (std::size_t t_prime = t; t_prime <= t_max; ++t_prime) {
    std::size_t halted = 0;
    std::size_t losses = 0;
    for (const auto& trace : cal2.traces) {
      const std::size_t halt = oracle_halt(trace, lambda);
      if (halt <= t_prime) {
        ++halted;
        losses += static_cast<std::size_t>(oracle_loss(trace, lambda));
      }
    }
    if (halted == 0) return false;
    if (earlystop::binom_cdf(losses, halted, cfg.alpha) > cfg.delta) return false;
  }
  return true;
}

struct OracleConditional {
  std::size_t t_star;
  earlystop::ThresholdVector lambda_hat;
};

inline OracleConditional oracle_test_candidates(const earlystop::TraceSet& cal2,
                                                const earlystop::ThresholdVector& eta,
                                                const earlystop::CalibConfig& cfg) {
  const std::size_t t_max = cal2.horizon();
  std::size_t t_star = t_max + 1;
  for (std::size_t t = t_max; t >= 1; --t) {
    if (!oracle_pass(cal2, eta, t, cfg)) break;
    t_star = t;
  }
  OracleConditional out;
  out.t_star = t_star;
  out.lambda_hat.assign(t_max, earlystop::kNeverHalt);
  if (t_star <= t_max) {
    for (std::size_t i = t_star - 1; i < t_max; ++i) out.lambda_hat[i] = eta[i];
  }
  return out;
}

}  // namespace estest
