#include "earlystop/marginal.hpp"

#include "earlystop/binomial.hpp"
#include "earlystop/errors.hpp"

namespace earlystop {

MarginalResult calibrate_marginal(const TraceSet& cal, const CalibConfig& cfg) {
  validate_trace_set(cal);
  cfg.validate();

  const std::size_t m = grid_step_count(cfg.grid_delta);
  const std::size_t n = cal.size();
  const std::size_t t_max = cal.horizon();

  MarginalResult result;
  // Descend over integer step indices so the grid values carry no
  // accumulated floating-point drift.
  for (std::size_t i = m + 1; i-- > 0;) {
    const double lambda = grid_value(i, m);
    const ThresholdVector thresholds(t_max, lambda);
    std::size_t loss_count = 0;
    for (const SampleTrace& trace : cal.traces) {
      loss_count += static_cast<std::size_t>(early_loss(trace, thresholds));
    }
    const double p = binom_cdf(loss_count, n, cfg.alpha);
    const bool rejected = p <= cfg.delta;
    result.trace_log.push_back({lambda, loss_count, n, p, rejected});
    if (!rejected) break;  // fixed sequence testing stops at the first failure
    result.lambda_hat = lambda;
  }
  return result;
}

double empirical_marginal_gap(const TraceSet& ts, const ThresholdVector& thresholds) {
  if (ts.traces.empty()) throw DomainError("empirical_marginal_gap: empty trace set");
  validate_trace_set(ts);
  validate_thresholds(thresholds, ts.horizon());
  std::size_t loss_count = 0;
  for (const SampleTrace& trace : ts.traces) {
    loss_count += static_cast<std::size_t>(early_loss(trace, thresholds));
  }
  return static_cast<double>(loss_count) / static_cast<double>(ts.size());
}

}  // namespace earlystop
