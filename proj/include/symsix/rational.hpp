#pragma once

// Exact rational combinatorics: factorials, binomials, Pochhammer symbols,
// Bernoulli numbers (cached) and Bernoulli polynomials.  Everything here is
// exact GMP arithmetic; nothing rounds.

#include "symsix/real.hpp"

#include <vector>

namespace symsix {

ExactInteger factorial_z(unsigned long n);

// Binomial coefficient with integer arguments; zero when k < 0 or k > n
// is out of range for n >= 0.  For negative upper argument use the
// rational-base overload below.
ExactInteger binomial_z(long n, long k);

// Binomial coefficient with rational upper argument: C(z, k) = (z)(z-1)...(z-k+1)/k!.
ExactRational binomial_q(const ExactRational& z, unsigned long k);

// Rising factorial (z)_n = z (z+1) ... (z+n-1), with (z)_0 = 1.
ExactRational pochhammer_q(const ExactRational& z, unsigned long n);

// Bernoulli number B_n (B_1 = -1/2 convention); cached, exact.
ExactRational bernoulli_q(unsigned long n);

// Bernoulli polynomial B_n(x), exact.
ExactRational bernoulli_poly_q(unsigned long n, const ExactRational& x);

// n! as a rational (convenience).
inline ExactRational factorial_q(unsigned long n) {
  return ExactRational(factorial_z(n));
}

// Canonicalized fraction num/den.  The two-argument mpq constructor skips
// gcd reduction, and exact comparisons (mpq_equal) assume canonical form,
// so every fraction whose parts might share a factor must be built here.
inline ExactRational frac_q(const ExactInteger& num, const ExactInteger& den) {
  ExactRational q(num, den);
  q.canonicalize();
  return q;
}

}  // namespace symsix
