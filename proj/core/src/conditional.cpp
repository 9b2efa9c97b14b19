#include "earlystop/conditional.hpp"

#include <algorithm>
#include <numeric>
#include <random>
#include <sstream>

#include "earlystop/binomial.hpp"
#include "earlystop/errors.hpp"

namespace earlystop {

namespace {

struct GapCount {
  std::size_t halted = 0;
  std::size_t losses = 0;
};

// Loss count and halt count over I = {i : halt_time(trace_i) <= t}.
GapCount count_gap(const TraceSet& ts, const ThresholdVector& thresholds, std::size_t t) {
  GapCount gc;
  for (const SampleTrace& trace : ts.traces) {
    const std::size_t halt = halt_time(trace, thresholds);
    if (halt <= t) {
      ++gc.halted;
      gc.losses += static_cast<std::size_t>(
          gap_loss(trace.full_correct(), trace.correctness[halt - 1]));
    }
  }
  return gc;
}

void check_timestep(std::size_t t, std::size_t t_max) {
  if (t < 1 || t > t_max) {
    std::ostringstream msg;
    msg << "timestep " << t << " outside {1, ..., " << t_max << "}";
    throw DomainError(msg.str());
  }
}

}  // namespace

std::optional<double> accumulated_gap(const TraceSet& ts, const ThresholdVector& thresholds,
                                      std::size_t t) {
  validate_trace_set(ts);
  validate_thresholds(thresholds, ts.horizon());
  check_timestep(t, ts.horizon());
  const GapCount gc = count_gap(ts, thresholds, t);
  if (gc.halted == 0) return std::nullopt;
  return static_cast<double>(gc.losses) / static_cast<double>(gc.halted);
}

ThresholdVector screen_candidates(const TraceSet& cal1, const CalibConfig& cfg) {
  validate_trace_set(cal1);
  cfg.validate();

  const std::size_t m = grid_step_count(cfg.grid_delta);
  const std::size_t t_max = cal1.horizon();
  ThresholdVector eta(t_max, kNeverHalt);

  for (std::size_t t = 1; t <= t_max; ++t) {
    // Working vector: entries before t are the committed candidates, entries
    // after t stay at kNeverHalt, and position t sweeps the grid upward.
    bool found = false;
    for (std::size_t i = 0; i <= m && !found; ++i) {
      eta[t - 1] = grid_value(i, m);
      const GapCount gc = count_gap(cal1, eta, t);
      if (gc.halted == 0) break;  // raising xi further only shrinks the halt set
      const double risk = static_cast<double>(gc.losses) / static_cast<double>(gc.halted);
      if (risk <= cfg.alpha) found = true;
    }
    if (!found) eta[t - 1] = kNeverHalt;
  }
  return eta;
}

ThresholdVector suffix_config(const ThresholdVector& eta_hat, std::size_t t) {
  check_timestep(t, eta_hat.size());
  ThresholdVector lambda(eta_hat.size(), kNeverHalt);
  for (std::size_t i = t - 1; i < eta_hat.size(); ++i) lambda[i] = eta_hat[i];
  return lambda;
}

ConditionalResult test_candidates(const TraceSet& cal2, const ThresholdVector& eta_hat,
                                  const CalibConfig& cfg) {
  validate_trace_set(cal2);
  cfg.validate();
  const std::size_t t_max = cal2.horizon();
  validate_thresholds(eta_hat, t_max);

  ConditionalResult result;
  result.eta_hat = eta_hat;
  result.lambda_hat.assign(t_max, kNeverHalt);
  result.t_star = t_max + 1;

  bool stopped = false;
  for (std::size_t t = t_max; t >= 1 && !stopped; --t) {
    // The committed vector so far is exactly lambda^{t+1}, so revealing one
    // more candidate entry yields lambda^t.
    ThresholdVector lambda = result.lambda_hat;
    lambda[t - 1] = eta_hat[t - 1];

    OuterTestRecord rec;
    rec.t = t;
    bool all_rejected = true;
    for (std::size_t t_prime = t; t_prime <= t_max; ++t_prime) {
      const GapCount gc = count_gap(cal2, lambda, t_prime);
      if (gc.halted == 0) {
        // No evidence to reject this finer null; all testing stops.
        rec.break_reason = BreakReason::empty_halt_set;
        rec.break_t_prime = t_prime;
        all_rejected = false;
        stopped = true;
        break;
      }
      const double p = binom_cdf(gc.losses, gc.halted, cfg.alpha);
      rec.finer.push_back({t_prime, gc.halted, gc.losses, p});
      if (p > cfg.delta) {
        rec.break_reason = BreakReason::p_above_delta;
        rec.break_t_prime = t_prime;
        all_rejected = false;
        stopped = true;
        break;
      }
    }
    result.test_log.push_back(std::move(rec));
    if (all_rejected) {
      result.lambda_hat = std::move(lambda);
      result.t_star = t;
    }
  }
  return result;
}

ConditionalResult calibrate_conditional_presplit(const TraceSet& cal1, const TraceSet& cal2,
                                                 const CalibConfig& cfg) {
  if (cal1.horizon() != cal2.horizon())
    throw ValidationError("stage-1 and stage-2 sets must share one horizon");
  const ThresholdVector eta = screen_candidates(cal1, cfg);
  return test_candidates(cal2, eta, cfg);
}

ConditionalResult calibrate_conditional(const TraceSet& cal, const CalibConfig& cfg) {
  validate_trace_set(cal);
  cfg.validate();
  const std::size_t n = cal.size();
  if (n < 2) throw DomainError("calibrate_conditional: need at least 2 samples to split");

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::mt19937_64 rng(cfg.seed);
  std::shuffle(order.begin(), order.end(), rng);

  const auto n1 = static_cast<std::size_t>(cfg.split_fraction * static_cast<double>(n));
  if (n1 == 0 || n1 == n)
    throw DomainError("calibrate_conditional: split_fraction leaves one stage empty");

  TraceSet cal1, cal2;
  cal1.traces.reserve(n1);
  cal2.traces.reserve(n - n1);
  for (std::size_t i = 0; i < n1; ++i) cal1.traces.push_back(cal.traces[order[i]]);
  for (std::size_t i = n1; i < n; ++i) cal2.traces.push_back(cal.traces[order[i]]);

  ConditionalResult result = calibrate_conditional_presplit(cal1, cal2, cfg);
  result.stage1_indices.assign(order.begin(), order.begin() + n1);
  result.stage2_indices.assign(order.begin() + n1, order.end());
  return result;
}

}  // namespace earlystop
