#include "earlystop/domain.hpp"

#include <doctest.h>

#include "earlystop/errors.hpp"

using namespace earlystop;

namespace {

SampleTrace make_trace(std::vector<double> conf, std::vector<std::uint8_t> corr) {
  return SampleTrace{std::move(conf), std::move(corr)};
}

}  // namespace

TEST_CASE("gap_loss is the clipped correctness difference") {
  CHECK(gap_loss(1, 0) == 1);
  CHECK(gap_loss(1, 1) == 0);
  CHECK(gap_loss(0, 1) == 0);  // negative difference clips to zero
  CHECK(gap_loss(0, 0) == 0);
}

TEST_CASE("halt_time fires at the first crossed threshold") {
  const SampleTrace trace = make_trace({0.3, 0.6, 0.9}, {0, 0, 1});
  CHECK(halt_time(trace, {0.5, 0.5, 0.5}) == 2);
}

TEST_CASE("halt_time falls back to t_max when nothing fires") {
  const SampleTrace trace = make_trace({0.99, 0.99}, {1, 1});
  const ThresholdVector never(2, kNeverHalt);
  CHECK(halt_time(trace, never) == 2);
  const HaltDecision d = halt_decision(trace, never);
  CHECK(d.time == 2);
  CHECK_FALSE(d.triggered);
}

TEST_CASE("halt_time halts on a tie: the comparison is >=") {
  const SampleTrace trace = make_trace({0.7, 0.1}, {1, 1});
  CHECK(halt_time(trace, {0.7, kNeverHalt}) == 1);
  CHECK(halt_decision(trace, {0.7, kNeverHalt}).triggered);
}

TEST_CASE("halt_time rejects a length mismatch") {
  const SampleTrace trace = make_trace({0.5, 0.5}, {1, 1});
  CHECK_THROWS_AS(halt_time(trace, {0.5}), ValidationError);
}

TEST_CASE("early_loss composes halting with the gap loss") {
  // Halts at t=1 where the prediction is wrong; full prediction is right.
  CHECK(early_loss(make_trace({0.9, 0.9}, {0, 1}), {0.5, kNeverHalt}) == 1);
  // Never halting early means the early prediction is the full one.
  CHECK(early_loss(make_trace({0.9, 0.9}, {0, 1}), {kNeverHalt, kNeverHalt}) == 0);
  // A sample that is correct everywhere never incurs loss.
  CHECK(early_loss(make_trace({0.9, 0.9}, {1, 1}), {0.0, 0.0}) == 0);
}

TEST_CASE("validate_trace_set names the first offending sample and field") {
  TraceSet ts;
  ts.traces.push_back(make_trace({0.5, 0.5}, {1, 0}));
  ts.traces.push_back(make_trace({0.5, 1.2}, {1, 0}));

  CHECK_THROWS_WITH_AS(validate_trace_set(ts),
                       "sample 1: confidence 1.2 at timestep 2 outside [0,1]", ValidationError);

  SUBCASE("mixed horizons are rejected") {
    ts.traces[1] = make_trace({0.5}, {1});
    CHECK_THROWS_AS(validate_trace_set(ts), ValidationError);
  }
  SUBCASE("a valid set passes") {
    ts.traces[1] = make_trace({0.5, 0.7}, {1, 1});
    CHECK_NOTHROW(validate_trace_set(ts));
  }
  SUBCASE("correctness must be a bit") {
    ts.traces[1] = make_trace({0.5, 0.7}, {1, 2});
    CHECK_THROWS_AS(validate_trace_set(ts), ValidationError);
  }
  SUBCASE("an empty set is invalid") {
    CHECK_THROWS_AS(validate_trace_set(TraceSet{}), ValidationError);
  }
}

TEST_CASE("grid_step_count accepts only resolutions that divide 1") {
  CHECK(grid_step_count(0.5) == 2);
  CHECK(grid_step_count(0.25) == 4);
  CHECK(grid_step_count(0.01) == 100);
  CHECK_THROWS_AS(grid_step_count(0.3), DomainError);
  CHECK_THROWS_AS(grid_step_count(0.0), DomainError);
  CHECK_THROWS_AS(grid_step_count(1.0), DomainError);
}

TEST_CASE("CalibConfig validation") {
  CalibConfig cfg;
  CHECK_NOTHROW(cfg.validate());  // stock defaults
  cfg.alpha = 1.0;                // degenerate bound used by validation runs
  CHECK_NOTHROW(cfg.validate());
  cfg.alpha = 0.0;
  CHECK_THROWS_AS(cfg.validate(), DomainError);
  cfg.alpha = 0.1;
  cfg.delta = 1.0;
  CHECK_THROWS_AS(cfg.validate(), DomainError);
  cfg.delta = 0.01;
  cfg.split_fraction = 1.0;
  CHECK_THROWS_AS(cfg.validate(), DomainError);
}
