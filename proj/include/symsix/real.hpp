#pragma once

// Arbitrary-precision real numbers on top of MPFR, with RAII ownership and a
// thread-local working precision.  Every freshly constructed Real (including
// results of arithmetic) is allocated at the current working precision, so a
// whole computation is retargeted by a single set_working_bits() call at
// startup.  Rounding is always to nearest.

#include <cstdarg>
#include <cstdio>

#include <mpfr.h>
#include <gmpxx.h>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>

namespace symsix {

using ExactRational = mpq_class;
using ExactInteger = mpz_class;

namespace detail {
inline mpfr_prec_t& working_bits_ref() {
  thread_local mpfr_prec_t bits = 256;
  return bits;
}
}  // namespace detail

inline void set_working_bits(mpfr_prec_t bits) {
  if (bits < 24 || bits > 1 << 20)
    throw std::invalid_argument("set_working_bits: unreasonable precision " +
                                std::to_string(bits));
  detail::working_bits_ref() = bits;
}

inline mpfr_prec_t working_bits() { return detail::working_bits_ref(); }

class Real {
 public:
  Real() {
    mpfr_init2(v_, working_bits());
    mpfr_set_zero(v_, 1);
  }
  Real(const Real& o) {
    mpfr_init2(v_, mpfr_get_prec(o.v_));
    mpfr_set(v_, o.v_, MPFR_RNDN);
  }
  Real(Real&& o) noexcept {
    mpfr_init2(v_, 24);
    mpfr_swap(v_, o.v_);
  }
  Real(long n) : Real() { mpfr_set_si(v_, n, MPFR_RNDN); }
  Real(int n) : Real() { mpfr_set_si(v_, n, MPFR_RNDN); }
  Real(unsigned long n) : Real() { mpfr_set_ui(v_, n, MPFR_RNDN); }
  Real(double d) : Real() { mpfr_set_d(v_, d, MPFR_RNDN); }
  Real(const ExactRational& q) : Real() {
    mpfr_set_q(v_, q.get_mpq_t(), MPFR_RNDN);
  }
  Real(const ExactInteger& z) : Real() {
    mpfr_set_z(v_, z.get_mpz_t(), MPFR_RNDN);
  }
  explicit Real(const std::string& s) : Real() {
    if (mpfr_set_str(v_, s.c_str(), 10, MPFR_RNDN) != 0)
      throw std::invalid_argument("Real: cannot parse \"" + s + "\"");
  }

  Real& operator=(const Real& o) {
    if (this != &o) mpfr_set(v_, o.v_, MPFR_RNDN);
    return *this;
  }
  Real& operator=(Real&& o) noexcept {
    if (this != &o) mpfr_swap(v_, o.v_);
    return *this;
  }
  ~Real() { mpfr_clear(v_); }

  mpfr_ptr get() { return v_; }
  mpfr_srcptr get() const { return v_; }

  double to_double() const { return mpfr_get_d(v_, MPFR_RNDN); }
  long to_long() const { return mpfr_get_si(v_, MPFR_RNDN); }
  bool is_zero() const { return mpfr_zero_p(v_) != 0; }
  bool is_nan() const { return mpfr_nan_p(v_) != 0; }
  bool is_finite() const { return mpfr_number_p(v_) != 0; }
  int sign() const { return mpfr_sgn(v_); }

  std::string to_string(int digits = 40) const {
    char* buf = nullptr;
    mpfr_asprintf(&buf, "%.*Re", digits, v_);
    std::string s(buf);
    mpfr_free_str(buf);
    return s;
  }

  Real& operator+=(const Real& o) {
    mpfr_add(v_, v_, o.v_, MPFR_RNDN);
    return *this;
  }
  Real& operator-=(const Real& o) {
    mpfr_sub(v_, v_, o.v_, MPFR_RNDN);
    return *this;
  }
  Real& operator*=(const Real& o) {
    mpfr_mul(v_, v_, o.v_, MPFR_RNDN);
    return *this;
  }
  Real& operator/=(const Real& o) {
    mpfr_div(v_, v_, o.v_, MPFR_RNDN);
    return *this;
  }

  friend Real operator+(const Real& a, const Real& b) {
    Real r;
    mpfr_add(r.v_, a.v_, b.v_, MPFR_RNDN);
    return r;
  }
  friend Real operator-(const Real& a, const Real& b) {
    Real r;
    mpfr_sub(r.v_, a.v_, b.v_, MPFR_RNDN);
    return r;
  }
  friend Real operator*(const Real& a, const Real& b) {
    Real r;
    mpfr_mul(r.v_, a.v_, b.v_, MPFR_RNDN);
    return r;
  }
  friend Real operator/(const Real& a, const Real& b) {
    Real r;
    mpfr_div(r.v_, a.v_, b.v_, MPFR_RNDN);
    return r;
  }
  friend Real operator-(const Real& a) {
    Real r;
    mpfr_neg(r.v_, a.v_, MPFR_RNDN);
    return r;
  }

  friend bool operator==(const Real& a, const Real& b) {
    return mpfr_cmp(a.v_, b.v_) == 0;
  }
  friend bool operator!=(const Real& a, const Real& b) {
    return mpfr_cmp(a.v_, b.v_) != 0;
  }
  friend bool operator<(const Real& a, const Real& b) {
    return mpfr_cmp(a.v_, b.v_) < 0;
  }
  friend bool operator<=(const Real& a, const Real& b) {
    return mpfr_cmp(a.v_, b.v_) <= 0;
  }
  friend bool operator>(const Real& a, const Real& b) {
    return mpfr_cmp(a.v_, b.v_) > 0;
  }
  friend bool operator>=(const Real& a, const Real& b) {
    return mpfr_cmp(a.v_, b.v_) >= 0;
  }

 private:
  mpfr_t v_;
};

// -- elementary functions ----------------------------------------------------

#define SYMSIX_REAL_UNARY(name, mpfr_name)              \
  inline Real name(const Real& x) {                     \
    Real r;                                             \
    mpfr_name(r.get(), x.get(), MPFR_RNDN);             \
    return r;                                           \
  }

SYMSIX_REAL_UNARY(abs, mpfr_abs)
SYMSIX_REAL_UNARY(sqrt, mpfr_sqrt)
SYMSIX_REAL_UNARY(exp, mpfr_exp)
SYMSIX_REAL_UNARY(log, mpfr_log)
SYMSIX_REAL_UNARY(sin, mpfr_sin)
SYMSIX_REAL_UNARY(cos, mpfr_cos)
SYMSIX_REAL_UNARY(tan, mpfr_tan)
SYMSIX_REAL_UNARY(atan, mpfr_atan)
SYMSIX_REAL_UNARY(asinh, mpfr_asinh)
SYMSIX_REAL_UNARY(sinh, mpfr_sinh)
SYMSIX_REAL_UNARY(cosh, mpfr_cosh)
SYMSIX_REAL_UNARY(tanh, mpfr_tanh)
#undef SYMSIX_REAL_UNARY

inline Real floor(const Real& x) {
  Real r;
  mpfr_rint(r.get(), x.get(), MPFR_RNDD);
  return r;
}

inline Real ceil(const Real& x) {
  Real r;
  mpfr_rint(r.get(), x.get(), MPFR_RNDU);
  return r;
}

inline Real round_nearest(const Real& x) {
  Real r;
  mpfr_rint(r.get(), x.get(), MPFR_RNDNA);
  return r;
}

inline Real atan2(const Real& y, const Real& x) {
  Real r;
  mpfr_atan2(r.get(), y.get(), x.get(), MPFR_RNDN);
  return r;
}

inline Real hypot(const Real& x, const Real& y) {
  Real r;
  mpfr_hypot(r.get(), x.get(), y.get(), MPFR_RNDN);
  return r;
}

inline Real pow(const Real& b, const Real& e) {
  Real r;
  mpfr_pow(r.get(), b.get(), e.get(), MPFR_RNDN);
  return r;
}

inline Real pow(const Real& b, long e) {
  Real r;
  mpfr_pow_si(r.get(), b.get(), e, MPFR_RNDN);
  return r;
}

inline Real const_pi() {
  Real r;
  mpfr_const_pi(r.get(), MPFR_RNDN);
  return r;
}

inline Real const_log2() {
  Real r;
  mpfr_const_log2(r.get(), MPFR_RNDN);
  return r;
}

inline Real max(const Real& a, const Real& b) { return a < b ? b : a; }
inline Real min(const Real& a, const Real& b) { return a < b ? a : b; }

// 2^{-k} as a Real, handy for tolerances tied to the working precision.
inline Real eps_bits(long k) {
  Real r(1l);
  mpfr_mul_2si(r.get(), r.get(), -k, MPFR_RNDN);
  return r;
}

// Default convergence target: a few guard bits under the working precision.
inline Real working_eps() { return eps_bits(working_bits() - 8); }

}  // namespace symsix
