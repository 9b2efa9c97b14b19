#include "earlystop/marginal.hpp"

#include <doctest.h>

#include "earlystop/errors.hpp"

using namespace earlystop;

namespace {

// Two traces over t_max = 2 on the grid {0, 0.5, 1}: A is always right, B is
// wrong at t=1 and right from t=2 on.
TraceSet example_pair() {
  TraceSet ts;
  ts.traces.push_back({{0.6, 0.6}, {1, 1}});  // A
  ts.traces.push_back({{0.4, 0.6}, {0, 1}});  // B
  return ts;
}

CalibConfig coarse_config(double alpha, double delta) {
  CalibConfig cfg;
  cfg.alpha = alpha;
  cfg.delta = delta;
  cfg.grid_delta = 0.5;
  return cfg;
}

}  // namespace

TEST_CASE("descending scan stops at the first non-rejection") {
  const MarginalResult r = calibrate_marginal(example_pair(), coarse_config(0.5, 0.5));
  CHECK(r.lambda_hat == 0.5);

  // lambda = 1 and 0.5 carry zero loss (p = 0.25); at 0 sample B halts wrong.
  REQUIRE(r.trace_log.size() == 3);
  CHECK(r.trace_log[0].lambda == 1.0);
  CHECK(r.trace_log[0].loss_count == 0);
  CHECK(r.trace_log[0].p_value == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(r.trace_log[0].rejected);
  CHECK(r.trace_log[1].lambda == 0.5);
  CHECK(r.trace_log[1].p_value == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(r.trace_log[1].rejected);
  CHECK(r.trace_log[2].lambda == 0.0);
  CHECK(r.trace_log[2].loss_count == 1);
  CHECK(r.trace_log[2].p_value == doctest::Approx(0.75).epsilon(1e-12));
  CHECK_FALSE(r.trace_log[2].rejected);
}

TEST_CASE("all-correct traces push lambda_hat to zero") {
  TraceSet ts;
  for (int i = 0; i < 10; ++i) ts.traces.push_back({{0.2, 0.9}, {1, 1}});
  // Zero loss at every grid value, and (1-alpha)^n = 0.5^10 <= delta.
  const MarginalResult r = calibrate_marginal(ts, coarse_config(0.5, 0.01));
  CHECK(r.lambda_hat == 0.0);
  CHECK(r.trace_log.size() == 3);
  for (const auto& rec : r.trace_log) CHECK(rec.loss_count == 0);
}

TEST_CASE("one underpowered sample yields the infinite fallback") {
  TraceSet ts;
  ts.traces.push_back({{0.5, 0.5, 0.5}, {0, 0, 1}});
  CalibConfig cfg;  // alpha = 0.1, delta = 0.01
  cfg.grid_delta = 0.5;
  // Even at lambda = 1 the p-value is CDF_bin(0; 1, 0.1) = 0.9 > delta.
  const MarginalResult r = calibrate_marginal(ts, cfg);
  CHECK(r.lambda_hat == kNeverHalt);
  REQUIRE(r.trace_log.size() == 1);
  CHECK(r.trace_log[0].p_value == doctest::Approx(0.9).epsilon(1e-12));
  CHECK(r.thresholds(3) == ThresholdVector(3, kNeverHalt));
}

TEST_CASE("empirical_marginal_gap on the example pair") {
  const TraceSet ts = example_pair();
  CHECK(empirical_marginal_gap(ts, ThresholdVector(2, 0.0)) == 0.5);
  CHECK(empirical_marginal_gap(ts, ThresholdVector(2, kNeverHalt)) == 0.0);
  CHECK(empirical_marginal_gap(ts, ThresholdVector(2, 0.5)) == 0.0);
}

TEST_CASE("empirical_marginal_gap rejects an empty set") {
  CHECK_THROWS_AS(empirical_marginal_gap(TraceSet{}, ThresholdVector{}), DomainError);
}
