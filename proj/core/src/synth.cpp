#include "earlystop/synth.hpp"

#include <cmath>
#include <random>

#include "earlystop/binomial.hpp"
#include "earlystop/conditional.hpp"
#include "earlystop/errors.hpp"
#include "earlystop/evaluate.hpp"
#include "earlystop/marginal.hpp"

namespace earlystop {

namespace {

// Canonical [0,1) double from the top 53 bits; keeps generation bit-exact
// across standard libraries, unlike std::uniform_real_distribution.
double next_unit(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

int next_bernoulli(std::mt19937_64& rng, double p) { return next_unit(rng) < p ? 1 : 0; }

double next_uniform(std::mt19937_64& rng, double lo, double hi) {
  return lo + next_unit(rng) * (hi - lo);
}

std::size_t draw_reveal_time(std::mt19937_64& rng, const GenParams& params) {
  if (params.reveal_law == RevealLaw::uniform) {
    return 1 + static_cast<std::size_t>(next_unit(rng) * static_cast<double>(params.t_max));
  }
  const double g = params.geometric_g;
  if (g >= 1.0) return 1;
  const double u = next_unit(rng);
  const double raw = std::floor(std::log1p(-u) / std::log1p(-g));
  auto t = static_cast<std::size_t>(raw) + 1;
  return std::min(t, params.t_max);
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

}  // namespace

void GenParams::validate() const {
  if (t_max < 1) throw DomainError("GenParams: t_max must be at least 1");
  if (n < 1) throw DomainError("GenParams: n must be at least 1");
  if (!(p_pre >= 0.0 && p_pre <= p_post && p_post <= 1.0))
    throw DomainError("GenParams: need 0 <= p_pre <= p_post <= 1");
  if (!(c_low > 0.0 && c_low <= c_mid && c_mid < 1.0))
    throw DomainError("GenParams: need 0 < c_low <= c_mid < 1");
  if (reveal_law == RevealLaw::geometric && !(geometric_g > 0.0 && geometric_g <= 1.0))
    throw DomainError("GenParams: geometric_g must lie in (0,1]");
}

TraceSet generate_traces(const GenParams& params) {
  params.validate();
  std::mt19937_64 rng(params.seed);

  TraceSet out;
  out.traces.reserve(params.n);
  for (std::size_t i = 0; i < params.n; ++i) {
    SampleTrace trace;
    trace.confidences.resize(params.t_max);
    trace.correctness.resize(params.t_max);
    const std::size_t reveal = draw_reveal_time(rng, params);
    const auto post_correct = static_cast<std::uint8_t>(next_bernoulli(rng, params.p_post));
    for (std::size_t t = 1; t <= params.t_max; ++t) {
      if (t < reveal) {
        trace.correctness[t - 1] = static_cast<std::uint8_t>(next_bernoulli(rng, params.p_pre));
        trace.confidences[t - 1] = next_uniform(rng, 0.0, params.c_low);
      } else {
        trace.correctness[t - 1] = post_correct;
        trace.confidences[t - 1] = next_uniform(rng, params.c_mid, 1.0);
      }
    }
    out.traces.push_back(std::move(trace));
  }
  return out;
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t counter) {
  return splitmix64(master ^ splitmix64(counter));
}

MCReport mc_validate(const GenParams& params, const CalibConfig& cfg, std::size_t trials,
                     std::size_t test_pool_size, CalibrationMode mode) {
  params.validate();
  cfg.validate();
  if (trials < 1) throw DomainError("mc_validate: trials must be at least 1");
  if (test_pool_size < 1) throw DomainError("mc_validate: test_pool_size must be at least 1");

  MCReport report;
  report.trials = trials;
  report.trial_records.reserve(trials);
  report.mean_accumulated_gap.assign(params.t_max, 0.0);
  report.gap_defined_trials.assign(params.t_max, 0);
  std::vector<double> gap_sums(params.t_max, 0.0);

  std::size_t marginal_violations = 0;
  std::size_t conditional_violations = 0;
  std::size_t nontrivial_count = 0;

  for (std::size_t trial = 0; trial < trials; ++trial) {
    GenParams cal_params = params;
    cal_params.seed = derive_seed(params.seed, 2 * trial);
    const TraceSet cal = generate_traces(cal_params);

    ThresholdVector thresholds;
    MCTrial rec;
    if (mode == CalibrationMode::marginal) {
      const MarginalResult r = calibrate_marginal(cal, cfg);
      thresholds = r.thresholds(params.t_max);
      rec.nontrivial = r.lambda_hat != kNeverHalt;
      rec.t_star = rec.nontrivial ? 1 : params.t_max + 1;
    } else {
      const ConditionalResult r = calibrate_conditional(cal, cfg);
      thresholds = r.lambda_hat;
      rec.t_star = r.t_star;
      rec.nontrivial = r.t_star <= params.t_max;
    }

    GenParams pool_params = params;
    pool_params.n = test_pool_size;
    pool_params.seed = derive_seed(params.seed, 2 * trial + 1);
    const TraceSet pool = generate_traces(pool_params);
    const RiskReport pool_report = evaluate_rule(pool, thresholds);

    rec.t_avg = pool_report.t_avg;
    rec.marginal_violated =
        pool_report.n >= kMinConclusiveHalts && pool_report.marginal_gap > cfg.alpha;
    for (std::size_t t = 0; t < params.t_max; ++t) {
      if (!pool_report.accumulated_gap[t]) continue;
      if (pool_report.accumulated_halts[t] < kMinConclusiveHalts) continue;  // inconclusive
      const double gap = *pool_report.accumulated_gap[t];
      gap_sums[t] += gap;
      report.gap_defined_trials[t] += 1;
      if (gap > cfg.alpha) rec.conditional_violated = true;
    }

    marginal_violations += rec.marginal_violated ? 1 : 0;
    conditional_violations += rec.conditional_violated ? 1 : 0;
    nontrivial_count += rec.nontrivial ? 1 : 0;
    report.trial_records.push_back(rec);
  }

  const auto rate = [trials](std::size_t count) {
    return static_cast<double>(count) / static_cast<double>(trials);
  };
  report.marginal_violation_rate = rate(marginal_violations);
  report.conditional_violation_rate = rate(conditional_violations);
  report.power = rate(nontrivial_count);
  report.marginal_rate_ci = binom_confidence_interval(marginal_violations, trials, 0.95);
  report.conditional_rate_ci = binom_confidence_interval(conditional_violations, trials, 0.95);
  for (std::size_t t = 0; t < params.t_max; ++t) {
    if (report.gap_defined_trials[t] > 0)
      report.mean_accumulated_gap[t] =
          gap_sums[t] / static_cast<double>(report.gap_defined_trials[t]);
  }
  return report;
}

}  // namespace earlystop
