#include "symsix/rational.hpp"

#include <mutex>
#include <stdexcept>

namespace symsix {

ExactInteger factorial_z(unsigned long n) {
  ExactInteger r;
  mpz_fac_ui(r.get_mpz_t(), n);
  return r;
}

ExactInteger binomial_z(long n, long k) {
  if (k < 0) return 0;
  if (n >= 0 && k > n) return 0;
  if (n >= 0) {
    ExactInteger r;
    mpz_bin_uiui(r.get_mpz_t(), (unsigned long)n, (unsigned long)k);
    return r;
  }
  // C(n, k) = (-1)^k C(k - n - 1, k) for n < 0.
  ExactInteger r;
  mpz_bin_uiui(r.get_mpz_t(), (unsigned long)(k - n - 1), (unsigned long)k);
  return (k % 2 == 0) ? r : ExactInteger(-r);
}

ExactRational binomial_q(const ExactRational& z, unsigned long k) {
  ExactRational num = 1;
  for (unsigned long i = 0; i < k; ++i) num *= z - ExactRational((long)i);
  return num / ExactRational(factorial_z(k));
}

ExactRational pochhammer_q(const ExactRational& z, unsigned long n) {
  ExactRational r = 1;
  for (unsigned long i = 0; i < n; ++i) r *= z + ExactRational((long)i);
  return r;
}

namespace {
// B_m via the defining recurrence sum_{k=0}^{m} C(m+1,k) B_k = 0 (m >= 1).
std::vector<ExactRational>& bernoulli_cache() {
  static std::vector<ExactRational> cache = {ExactRational(1),
                                             ExactRational(-1, 2)};
  return cache;
}
std::mutex bernoulli_mutex;
}  // namespace

ExactRational bernoulli_q(unsigned long n) {
  std::lock_guard<std::mutex> lock(bernoulli_mutex);
  auto& cache = bernoulli_cache();
  while (cache.size() <= n) {
    unsigned long m = cache.size();
    if (m % 2 == 1) {
      cache.push_back(ExactRational(0));
      continue;
    }
    ExactRational acc = 0;
    for (unsigned long k = 0; k < m; ++k)
      acc += ExactRational(binomial_z((long)m + 1, (long)k)) * cache[k];
    cache.push_back(-acc / ExactRational((long)m + 1));
  }
  return cache[n];
}

ExactRational bernoulli_poly_q(unsigned long n, const ExactRational& x) {
  // B_n(x) = sum_k C(n,k) B_k x^{n-k}
  ExactRational acc = 0;
  ExactRational xpow = 1;
  // accumulate from k = n down to 0 so x-powers build upward
  for (long k = (long)n; k >= 0; --k) {
    acc += ExactRational(binomial_z((long)n, k)) * bernoulli_q((unsigned long)k) * xpow;
    if (k > 0) xpow *= x;
  }
  return acc;
}

}  // namespace symsix
