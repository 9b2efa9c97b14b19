#include "earlystop/binomial.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "earlystop/errors.hpp"

namespace earlystop {

namespace {

double log_choose(double lgamma_n1, std::size_t n, std::size_t j) {
  return lgamma_n1 - std::lgamma(static_cast<double>(j) + 1.0) -
         std::lgamma(static_cast<double>(n - j) + 1.0);
}

}  // namespace

double binom_cdf(std::size_t k, std::size_t n, double alpha) {
  if (n == 0) throw DomainError("binom_cdf: n must be at least 1");
  if (k > n) throw DomainError("binom_cdf: k must not exceed n");
  if (!(alpha > 0.0 && alpha <= 1.0)) throw DomainError("binom_cdf: alpha must lie in (0,1]");
  if (k == n) return 1.0;
  if (alpha == 1.0) return 0.0;  // every draw succeeds, all mass sits at k == n

  const double log_a = std::log(alpha);
  const double log_b = std::log1p(-alpha);
  const double lgamma_n1 = std::lgamma(static_cast<double>(n) + 1.0);

  std::vector<double> log_terms(k + 1);
  double max_log = -std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j <= k; ++j) {
    const double lt = log_choose(lgamma_n1, n, j) + static_cast<double>(j) * log_a +
                      static_cast<double>(n - j) * log_b;
    log_terms[j] = lt;
    max_log = std::max(max_log, lt);
  }

  // Shift by the largest term and add the rest smallest-first so the tiny
  // contributions are not swallowed before the comparable ones arrive.
  std::sort(log_terms.begin(), log_terms.end());
  double sum = 0.0;
  for (const double lt : log_terms) sum += std::exp(lt - max_log);

  const double result = std::exp(max_log + std::log(sum));
  return std::min(result, 1.0);
}

std::pair<double, double> binom_confidence_interval(std::size_t successes, std::size_t n,
                                                    double level) {
  if (n == 0) throw DomainError("binom_confidence_interval: n must be at least 1");
  if (successes > n) throw DomainError("binom_confidence_interval: successes must not exceed n");
  if (!(level > 0.0 && level < 1.0))
    throw DomainError("binom_confidence_interval: level must lie in (0,1)");
  const double tail = (1.0 - level) / 2.0;

  // Monotone bisection on p; binom_cdf(k, n, p) is decreasing in p.
  auto solve = [n](std::size_t k, double target) {
    double lo = 0.0, hi = 1.0;
    for (int iter = 0; iter < 200; ++iter) {
      const double mid = 0.5 * (lo + hi);
      if (mid <= 0.0 || mid >= 1.0) break;
      if (binom_cdf(k, n, mid) > target)
        lo = mid;
      else
        hi = mid;
    }
    return 0.5 * (lo + hi);
  };

  const double lower = (successes == 0) ? 0.0 : solve(successes - 1, 1.0 - tail);
  const double upper = (successes == n) ? 1.0 : solve(successes, tail);
  return {lower, upper};
}

}  // namespace earlystop
