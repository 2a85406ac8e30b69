#include "symsix/special.hpp"

#include <stdexcept>

namespace symsix {

namespace {

// Stirling's asymptotic series for log Gamma is reliable once Re(z) exceeds a
// threshold that scales with the working precision; below it we shift up by
// the recurrence Gamma(z) = Gamma(z+1)/z and subtract the logs of the crossed
// factors.  The series terms B_{2j} / (2j(2j-1) z^{2j-1}) eventually diverge,
// so we stop at the smallest term and fail loudly if that smallest term is
// still above the target accuracy.
Real stirling_threshold() {
  long bits = (long)working_bits();
  long t = (long)(0.4 * (double)bits) + 8;
  return Real(t < 24 ? 24 : t);
}

bool is_nonpositive_integer(const BigComplex& z) {
  if (!z.im.is_zero()) return false;
  if (z.re > Real(0l)) return false;
  return floor(z.re) == z.re;
}

}  // namespace

BigComplex log_gamma_complex(const BigComplex& z) {
  if (is_nonpositive_integer(z))
    throw std::domain_error("log_gamma_complex: pole at non-positive integer");

  const Real sigma0 = stirling_threshold();
  BigComplex w = z;
  // Shift into Re(w) >= sigma0, collecting log of the crossed factors.
  BigComplex shift_log(0l);
  while (w.re < sigma0) {
    shift_log += log(w);
    w.re += Real(1l);
  }

  const Real pi = const_pi();
  BigComplex lw = log(w);
  BigComplex acc = (w - BigComplex(Real(ExactRational(1, 2)))) * lw - w;
  acc.re += log(pi * Real(2l)) / Real(2l);

  const Real eps = working_eps();
  BigComplex w2 = w * w;
  BigComplex zpow = w;  // w^{2j-1} for j = 1
  Real prev_term_mag(0l);
  bool converged = false;
  for (unsigned long j = 1; j <= 4 * (unsigned long)working_bits(); ++j) {
    ExactRational b = bernoulli_q(2 * j);
    ExactRational denom = ExactRational(2 * j) * ExactRational(2 * j - 1);
    BigComplex term = BigComplex(Real(b / denom)) / zpow;
    Real mag = abs(term);
    if (j > 1 && mag > prev_term_mag) {
      // Series started diverging before reaching target accuracy.
      if (prev_term_mag > eps * max(abs(acc), Real(1l)))
        throw std::runtime_error(
            "log_gamma_complex: Stirling series stalled above tolerance");
      converged = true;
      break;
    }
    acc += term;
    if (mag < eps * max(abs(acc), Real(1l))) {
      converged = true;
      break;
    }
    prev_term_mag = mag;
    zpow *= w2;
  }
  if (!converged)
    throw std::runtime_error("log_gamma_complex: Stirling series cap hit");

  return acc - shift_log;
}

BigComplex gamma_complex(const BigComplex& z) {
  return exp(log_gamma_complex(z));
}

BigComplex zeta_complex(const BigComplex& s) {
  if (s.im.is_zero() && s.re == Real(1l))
    throw std::domain_error("zeta_complex: pole at s = 1");

  // Euler-Maclaurin: zeta(s) = sum_{n<N} n^{-s} + N^{1-s}/(s-1) + N^{-s}/2
  //   + sum_{j>=1} B_{2j}/(2j)! * (s)_{2j-1} * N^{-s-2j+1}.
  // N grows with precision and |Im s| to keep the correction series decaying
  // long enough to reach the target accuracy.
  long bits = (long)working_bits();
  double ims = abs(s.im).to_double();
  long N = (long)(0.33 * (double)bits + 0.6 * ims) + 12;

  BigComplex acc(0l);
  for (long n = 1; n < N; ++n) {
    Real ln_n = log(Real(n));
    acc += exp(BigComplex(-s.re * ln_n, -s.im * ln_n));
  }
  const Real Nr = Real(N);
  const BigComplex lnN(log(Nr));
  const BigComplex N_ms = exp(BigComplex(0l) - s * lnN);  // N^{-s}
  acc += N_ms * Nr / (s - BigComplex(1l));                // N^{1-s}/(s-1)
  acc += N_ms / Real(2l);

  const Real eps = working_eps();
  BigComplex poch(1l);         // (s)_{2j-1}, extended incrementally
  BigComplex npw = N_ms * Nr;  // N^{-s-2j+1}; starts at j=0 value N^{1-s}
  Real prev_mag(0l);
  bool converged = false;
  for (unsigned long j = 1; j <= 2 * (unsigned long)bits; ++j) {
    if (j == 1) {
      poch = s;
    } else {
      poch *= (s + BigComplex(Real((long)(2 * j - 3))));
      poch *= (s + BigComplex(Real((long)(2 * j - 2))));
    }
    npw /= Nr * Nr;
    ExactRational c = bernoulli_q(2 * j) / ExactRational(factorial_z(2 * j));
    BigComplex term = BigComplex(Real(c)) * poch * npw;
    Real mag = abs(term);
    if (j > 2 && mag > prev_mag) {
      if (prev_mag > eps * max(abs(acc), Real(1l)))
        throw std::runtime_error("zeta_complex: Euler-Maclaurin stalled");
      converged = true;
      break;
    }
    acc += term;
    if (mag < eps * max(abs(acc), Real(1l))) {
      converged = true;
      break;
    }
    prev_mag = mag;
  }
  if (!converged) throw std::runtime_error("zeta_complex: series cap hit");
  return acc;
}

BigComplex gamma_R(const BigComplex& s) {
  const Real pi = const_pi();
  BigComplex p = exp((BigComplex(0l) - s / Real(2l)) * log(BigComplex(pi)));
  return p * gamma_complex(s / Real(2l));
}

BigComplex gamma_C(const BigComplex& s) {
  const Real two_pi = const_pi() * Real(2l);
  BigComplex p = exp((BigComplex(0l) - s) * log(BigComplex(two_pi)));
  return Real(2l) * p * gamma_complex(s);
}

BigComplex xi_Q(const BigComplex& s) { return gamma_R(s) * zeta_complex(s); }

std::vector<ExactInteger> hermite_coeffs(unsigned long r) {
  // H_0 = 1, H_1 = 2x, H_{n+1} = 2x H_n - 2n H_{n-1}
  std::vector<ExactInteger> a = {1}, b = {0, 2};
  if (r == 0) return a;
  if (r == 1) return b;
  for (unsigned long n = 1; n < r; ++n) {
    std::vector<ExactInteger> c(n + 2, ExactInteger(0));
    for (unsigned long i = 0; i <= n; ++i) c[i + 1] += 2 * b[i];
    for (unsigned long i = 0; i < a.size(); ++i)
      c[i] -= ExactInteger(2 * (long)n) * a[i];
    a = std::move(b);
    b = std::move(c);
  }
  return b;
}

Real hermite_eval(unsigned long r, const Real& x) {
  Real hm(1l), h(x * Real(2l));
  if (r == 0) return hm;
  for (unsigned long n = 1; n < r; ++n) {
    Real next = Real(2l) * x * h - Real((long)(2 * n)) * hm;
    hm = std::move(h);
    h = std::move(next);
  }
  return h;
}

}  // namespace symsix
