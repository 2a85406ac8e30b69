#pragma once

// Complex arithmetic over symsix::Real.  Kept as a plain pair of Reals with
// value semantics; all transcendental functions use principal branches.

#include "symsix/real.hpp"

namespace symsix {

struct BigComplex {
  Real re, im;

  BigComplex() = default;
  BigComplex(Real r) : re(std::move(r)), im(0l) {}
  BigComplex(Real r, Real i) : re(std::move(r)), im(std::move(i)) {}
  BigComplex(long r) : re(r), im(0l) {}
  BigComplex(int r) : re(long(r)), im(0l) {}
  BigComplex(double r) : re(r), im(0l) {}
  BigComplex(const ExactRational& q) : re(q), im(0l) {}

  bool is_zero() const { return re.is_zero() && im.is_zero(); }

  BigComplex& operator+=(const BigComplex& o) {
    re += o.re;
    im += o.im;
    return *this;
  }
  BigComplex& operator-=(const BigComplex& o) {
    re -= o.re;
    im -= o.im;
    return *this;
  }
  BigComplex& operator*=(const BigComplex& o) {
    *this = *this * o;
    return *this;
  }
  BigComplex& operator/=(const BigComplex& o) {
    *this = *this / o;
    return *this;
  }

  friend BigComplex operator+(const BigComplex& a, const BigComplex& b) {
    return {a.re + b.re, a.im + b.im};
  }
  friend BigComplex operator-(const BigComplex& a, const BigComplex& b) {
    return {a.re - b.re, a.im - b.im};
  }
  friend BigComplex operator-(const BigComplex& a) { return {-a.re, -a.im}; }
  friend BigComplex operator*(const BigComplex& a, const BigComplex& b) {
    return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
  }
  friend BigComplex operator*(const Real& a, const BigComplex& b) {
    return {a * b.re, a * b.im};
  }
  friend BigComplex operator*(const BigComplex& a, const Real& b) {
    return {a.re * b, a.im * b};
  }
  friend BigComplex operator/(const BigComplex& a, const BigComplex& b) {
    Real d = b.re * b.re + b.im * b.im;
    if (d.is_zero()) throw std::domain_error("BigComplex: division by zero");
    return {(a.re * b.re + a.im * b.im) / d, (a.im * b.re - a.re * b.im) / d};
  }
  friend BigComplex operator/(const BigComplex& a, const Real& b) {
    return {a.re / b, a.im / b};
  }

  friend bool operator==(const BigComplex& a, const BigComplex& b) {
    return a.re == b.re && a.im == b.im;
  }
};

inline BigComplex conj(const BigComplex& z) { return {z.re, -z.im}; }
inline Real abs(const BigComplex& z) { return hypot(z.re, z.im); }
inline Real norm_sq(const BigComplex& z) { return z.re * z.re + z.im * z.im; }
inline Real arg(const BigComplex& z) { return atan2(z.im, z.re); }

inline BigComplex exp(const BigComplex& z) {
  Real m = exp(z.re);
  return {m * cos(z.im), m * sin(z.im)};
}

// Principal logarithm (imaginary part in (-pi, pi]).
inline BigComplex log(const BigComplex& z) {
  if (z.is_zero()) throw std::domain_error("BigComplex: log of zero");
  return {log(abs(z)), arg(z)};
}

inline BigComplex pow(const BigComplex& b, const BigComplex& e) {
  if (b.is_zero()) {
    if (e.is_zero()) return BigComplex(1l);
    return BigComplex(0l);
  }
  return exp(e * log(b));
}

inline BigComplex pow(const BigComplex& b, long e) {
  if (b.is_zero()) {
    if (e == 0) return BigComplex(1l);
    if (e < 0) throw std::domain_error("BigComplex: 0^negative");
    return BigComplex(0l);
  }
  BigComplex acc(1l), base = b;
  unsigned long n = e < 0 ? -(unsigned long)e : (unsigned long)e;
  while (n) {
    if (n & 1) acc *= base;
    base *= base;
    n >>= 1;
  }
  if (e < 0) return BigComplex(1l) / acc;
  return acc;
}

// Principal square root.
inline BigComplex sqrt(const BigComplex& z) {
  if (z.is_zero()) return z;
  Real r = abs(z);
  Real u = sqrt((r + z.re) / Real(2l));
  if (u.is_zero()) return {u, sqrt(r)};  // negative real axis
  Real v = z.im / (u * Real(2l));
  return {u, v};
}

// exp(2 pi i theta) with theta an exact rational carried losslessly until
// this final materialization.
inline BigComplex unit_root(const ExactRational& theta) {
  Real t = Real(theta) * const_pi() * Real(2l);
  return {cos(t), sin(t)};
}

}  // namespace symsix
