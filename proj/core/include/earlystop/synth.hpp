#pragma once

#include <cstddef>
#include <cstdint>
#include <utility>
#include <vector>

#include "earlystop/domain.hpp"

namespace earlystop {

enum class RevealLaw {
  uniform,    // reveal time uniform over {1, ..., t_max}
  geometric,  // P(T = t) proportional to g(1-g)^(t-1), truncated at t_max
};

/// Law of a synthetic trace. Each sample draws a reveal time T; before T the
/// per-timestep correctness is an independent Bernoulli(p_pre) and the
/// confidence is Uniform(0, c_low); at T one Bernoulli(p_post) draw fixes the
/// correctness for all t >= T (so full-sequence accuracy is p_post) and
/// confidences switch to Uniform(c_mid, 1).
struct GenParams {
  std::size_t t_max = 10;
  std::size_t n = 1000;
  RevealLaw reveal_law = RevealLaw::uniform;
  double geometric_g = 0.5;  // only read when reveal_law == geometric
  double p_pre = 0.3;
  double p_post = 0.95;
  double c_low = 0.4;
  double c_mid = 0.6;
  std::uint64_t seed = 0;

  void validate() const;
};

/// n i.i.d. traces from the documented law; bit-identical for equal params.
TraceSet generate_traces(const GenParams& params);

/// Seed for the counter-th derived stream of a master seed. Trial i of
/// mc_validate draws its calibration set with counter 2i and its test pool
/// with counter 2i+1, so any trial can be regenerated on its own.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t counter);

enum class CalibrationMode { marginal, conditional };

/// A conditional-risk timestep only counts toward a violation when the test
/// pool puts at least this many halts on it; below that the estimate is
/// noise and the timestep is inconclusive, not violated.
inline constexpr std::size_t kMinConclusiveHalts = 100;

struct MCTrial {
  bool marginal_violated = false;
  bool conditional_violated = false;
  bool nontrivial = false;  // marginal: lambda_hat finite; conditional: t_star <= t_max
  std::size_t t_star = 0;   // 1 for a finite marginal rule, t_max+1 for the trivial one
  double t_avg = 0.0;
};

struct MCReport {
  std::size_t trials = 0;
  std::vector<MCTrial> trial_records;

  double marginal_violation_rate = 0.0;
  double conditional_violation_rate = 0.0;
  std::pair<double, double> marginal_rate_ci{0.0, 0.0};     // exact binomial, 95%
  std::pair<double, double> conditional_rate_ci{0.0, 0.0};  // exact binomial, 95%
  double power = 0.0;  // fraction of trials with a nontrivial rule

  // Across trials, mean of the test-pool accumulated gap at each t, counting
  // only trials where that t was conclusive; gap_defined_trials reports how
  // many that was.
  std::vector<double> mean_accumulated_gap;
  std::vector<std::size_t> gap_defined_trials;
};

/// Monte-Carlo certification of the calibration guarantees: each trial draws
/// a fresh calibration set of params.n samples, calibrates in the requested
/// mode, approximates the true risks on a fresh pool of test_pool_size
/// samples, and records which guarantees the pool estimate violates. The
/// violation rates should stay within delta plus Monte-Carlo slack.
MCReport mc_validate(const GenParams& params, const CalibConfig& cfg, std::size_t trials,
                     std::size_t test_pool_size, CalibrationMode mode);

}  // namespace earlystop
