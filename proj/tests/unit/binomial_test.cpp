#include "earlystop/binomial.hpp"

#include <cmath>

#include <doctest.h>

#include "earlystop/errors.hpp"
#include "support/rational_binomial.hpp"

using namespace earlystop;

TEST_CASE("binom_cdf analytic corners") {
  // k = 0 is just (1-alpha)^n.
  CHECK(binom_cdf(0, 10, 0.1) == doctest::Approx(0.3486784401).epsilon(1e-12));
  // Full support.
  CHECK(binom_cdf(10, 10, 0.1) == 1.0);
}

TEST_CASE("binom_cdf matches the high-precision term sum") {
  // Frozen from the exact-rational oracle: sum_{j<=2} C(10,j) 0.1^j 0.9^(10-j).
  const double expected = 0.9298091736;
  CHECK(binom_cdf(2, 10, 0.1) == doctest::Approx(expected).epsilon(1e-10));
  const double oracle = estest::rational_binom_cdf(2, 10, {1, 10});
  CHECK(binom_cdf(2, 10, 0.1) == doctest::Approx(oracle).epsilon(1e-12));
}

TEST_CASE("binom_cdf rejects out-of-domain arguments") {
  CHECK_THROWS_AS(binom_cdf(3, 2, 0.1), DomainError);
  CHECK_THROWS_AS(binom_cdf(0, 0, 0.1), DomainError);
  CHECK_THROWS_AS(binom_cdf(0, 2, 0.0), DomainError);
  CHECK_THROWS_AS(binom_cdf(0, 2, 1.5), DomainError);
}

TEST_CASE("binom_cdf at the degenerate alpha = 1") {
  CHECK(binom_cdf(3, 5, 1.0) == 0.0);
  CHECK(binom_cdf(5, 5, 1.0) == 1.0);
}

TEST_CASE("binom_cdf stays stable at n = 10^6") {
  const double at_mean = binom_cdf(100000, 1000000, 0.1);
  CHECK(at_mean > 0.45);
  CHECK(at_mean < 0.55);
  const double in_tail = binom_cdf(90000, 1000000, 0.1);
  CHECK(in_tail > 0.0);
  CHECK(in_tail < 1e-200);  // far below the mean but not flushed to zero
}

TEST_CASE("binom_confidence_interval endpoints") {
  // k = 0 upper bound solves (1-p)^n = tail.
  const auto [lo0, hi0] = binom_confidence_interval(0, 10, 0.95);
  CHECK(lo0 == 0.0);
  CHECK(hi0 == doctest::Approx(1.0 - std::pow(0.025, 0.1)).epsilon(1e-9));
  const auto [lon, hin] = binom_confidence_interval(10, 10, 0.95);
  CHECK(hin == 1.0);
  CHECK(lon == doctest::Approx(std::pow(0.025, 0.1)).epsilon(1e-9));
  // The interval brackets the point estimate.
  const auto [lo, hi] = binom_confidence_interval(3, 20, 0.95);
  CHECK(lo < 0.15);
  CHECK(hi > 0.15);
}
