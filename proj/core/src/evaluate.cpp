#include "earlystop/evaluate.hpp"

#include <algorithm>
#include <numeric>

#include "earlystop/errors.hpp"

namespace earlystop {

namespace {

// Mean gap loss over the `take` samples with the smallest halt times,
// stable in input order.
double earliest_quantile_gap(const std::vector<std::size_t>& halt_times,
                             const std::vector<int>& losses, std::size_t take) {
  std::vector<std::size_t> order(halt_times.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return halt_times[a] < halt_times[b]; });
  std::size_t loss_count = 0;
  for (std::size_t i = 0; i < take; ++i) loss_count += static_cast<std::size_t>(losses[order[i]]);
  return static_cast<double>(loss_count) / static_cast<double>(take);
}

}  // namespace

RiskReport evaluate_rule(const TraceSet& test, const ThresholdVector& thresholds) {
  validate_trace_set(test);
  validate_thresholds(thresholds, test.horizon());

  RiskReport rep;
  rep.n = test.size();
  rep.t_max = test.horizon();
  rep.halt_histogram.assign(rep.t_max, 0);
  rep.accumulated_halts.assign(rep.t_max, 0);
  rep.accumulated_gap.assign(rep.t_max, std::nullopt);

  std::vector<std::size_t> halts(rep.n);
  std::vector<int> losses(rep.n);
  std::size_t halt_sum = 0;
  std::size_t early_correct = 0;
  std::size_t full_correct = 0;

  for (std::size_t i = 0; i < rep.n; ++i) {
    const SampleTrace& trace = test.traces[i];
    const HaltDecision d = halt_decision(trace, thresholds);
    halts[i] = d.time;
    if (!d.triggered) ++rep.fallback_halts;
    losses[i] = gap_loss(trace.full_correct(), trace.correctness[d.time - 1]);
    rep.halt_histogram[d.time - 1] += 1;
    halt_sum += d.time;
    early_correct += trace.correctness[d.time - 1];
    full_correct += static_cast<std::size_t>(trace.full_correct());
  }

  std::size_t halted_so_far = 0;
  std::size_t losses_so_far = 0;
  for (std::size_t t = 0; t < rep.t_max; ++t) {
    for (std::size_t i = 0; i < rep.n; ++i) {
      if (halts[i] == t + 1) losses_so_far += static_cast<std::size_t>(losses[i]);
    }
    halted_so_far += rep.halt_histogram[t];
    rep.accumulated_halts[t] = halted_so_far;
    if (halted_so_far > 0)
      rep.accumulated_gap[t] =
          static_cast<double>(losses_so_far) / static_cast<double>(halted_so_far);
  }

  rep.marginal_gap = *rep.accumulated_gap[rep.t_max - 1];
  rep.t_avg = static_cast<double>(halt_sum) / static_cast<double>(rep.n * rep.t_max);
  rep.early_accuracy = static_cast<double>(early_correct) / static_cast<double>(rep.n);
  rep.full_accuracy = static_cast<double>(full_correct) / static_cast<double>(rep.n);
  rep.quantile_gap_20 = earliest_quantile_gap(halts, losses, (rep.n + 4) / 5);  // ceil(n/5)
  rep.quantile_gap_50 = earliest_quantile_gap(halts, losses, (rep.n + 1) / 2);  // ceil(n/2)
  return rep;
}

GuaranteeCheck guarantee_check(const RiskReport& report, double alpha) {
  GuaranteeCheck check;
  for (std::size_t t = 0; t < report.t_max; ++t) {
    if (report.accumulated_gap[t] && *report.accumulated_gap[t] > alpha) {
      check.conditional_violated = true;
      check.first_violation_t = t + 1;
      break;
    }
  }
  check.marginal_violated = report.marginal_gap > alpha;
  return check;
}

}  // namespace earlystop
