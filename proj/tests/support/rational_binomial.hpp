#pragma once

// Exact-rational binomial CDF oracle. Everything is computed in mpq
// arithmetic, so the only rounding happens in the final conversion to
// double; the production implementation must agree to 1e-10 relative.

#include <cstddef>
#include <vector>

#include <gmpxx.h>

namespace estest {

// Success probability given as the exact rational a_num/a_den.
struct RationalAlpha {
  unsigned long num;
  unsigned long den;
  double as_double() const { return static_cast<double>(num) / static_cast<double>(den); }
};

// CDF values for every k = 0..n at once, via the term recurrence
// term_{j+1} = term_j * (n-j)/(j+1) * p/(1-p).
inline std::vector<mpq_class> rational_binom_cdf_table(unsigned long n, RationalAlpha alpha) {
  const mpq_class p(alpha.num, alpha.den);
  const mpq_class q = 1 - p;

  mpz_class q_num_pow;
  mpz_pow_ui(q_num_pow.get_mpz_t(), q.get_num().get_mpz_t(), n);
  mpz_class q_den_pow;
  mpz_pow_ui(q_den_pow.get_mpz_t(), q.get_den().get_mpz_t(), n);
  mpq_class term(q_num_pow, q_den_pow);  // (1-p)^n
  term.canonicalize();

  const mpq_class ratio = p / q;
  std::vector<mpq_class> cdf;
  cdf.reserve(n + 1);
  mpq_class sum = term;
  cdf.push_back(sum);
  for (unsigned long j = 0; j < n; ++j) {
    term *= ratio;
    term *= static_cast<unsigned long>(n - j);
    term /= static_cast<unsigned long>(j + 1);
    sum += term;
    cdf.push_back(sum);
  }
  return cdf;
}

inline double rational_binom_cdf(std::size_t k, std::size_t n, RationalAlpha alpha) {
  const auto table = rational_binom_cdf_table(static_cast<unsigned long>(n), alpha);
  return table[k].get_d();
}

}  // namespace estest
