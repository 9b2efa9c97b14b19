#pragma once

#include <cstddef>
#include <utility>

namespace earlystop {

/// Exact lower tail of Binomial(n, alpha):
///
///   sum_{j=0}^{k} C(n,j) alpha^j (1-alpha)^{n-j}
///
/// This is the p-value attached to an empirical loss count k out of n under
/// the null "true risk > alpha"; it is super-uniform under that null.
/// Terms are accumulated in log space, smallest first, which keeps the
/// relative error within ~1e-12 for n up to 10^6.
///
/// Throws DomainError when n == 0, k > n, or alpha is outside (0,1]. The
/// degenerate alpha == 1 returns the pointwise limit (0 below k == n).
double binom_cdf(std::size_t k, std::size_t n, double alpha);

/// Exact (Clopper-Pearson) two-sided confidence interval for a binomial
/// proportion, inverted from binom_cdf by bisection. `level` is the coverage,
/// e.g. 0.95. Returns {lower, upper}.
std::pair<double, double> binom_confidence_interval(std::size_t successes, std::size_t n,
                                                    double level);

}  // namespace earlystop
