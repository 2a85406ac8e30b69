#pragma once

// Exact multivariate Laurent polynomials and rational functions over the
// rationals.  Exponents may be negative; coefficients are exact.  Equality of
// rational functions is decided by cross-multiplication, so no gcd machinery
// is needed.  These are the workhorses for every "holds as an identity of
// rational functions" check in the suite, and for carrying pi-graded exact
// constants (a distinguished variable standing for sqrt(pi)).

#include "symsix/complexnum.hpp"
#include "symsix/rational.hpp"

#include <array>
#include <map>
#include <stdexcept>
#include <string>

namespace symsix {

template <int N>
class LaurentPoly {
 public:
  using Exps = std::array<long, N>;

  LaurentPoly() = default;
  /*implicit*/ LaurentPoly(const ExactRational& c) {
    if (c != 0) terms_[Exps{}] = c;
  }
  /*implicit*/ LaurentPoly(long c) : LaurentPoly(ExactRational(c)) {}

  static LaurentPoly monomial(const ExactRational& c, const Exps& e) {
    LaurentPoly p;
    if (c != 0) p.terms_[e] = c;
    return p;
  }
  // x_var as a polynomial
  static LaurentPoly variable(int var, long power = 1) {
    Exps e{};
    e[var] = power;
    return monomial(1, e);
  }

  const std::map<Exps, ExactRational>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  size_t size() const { return terms_.size(); }

  bool operator==(const LaurentPoly& o) const { return terms_ == o.terms_; }
  bool operator!=(const LaurentPoly& o) const { return !(*this == o); }

  LaurentPoly operator-() const {
    LaurentPoly r;
    for (auto& [e, c] : terms_) r.terms_[e] = -c;
    return r;
  }

  LaurentPoly& operator+=(const LaurentPoly& o) {
    for (auto& [e, c] : o.terms_) {
      auto it = terms_.find(e);
      if (it == terms_.end()) {
        terms_.emplace(e, c);
      } else {
        it->second += c;
        if (it->second == 0) terms_.erase(it);
      }
    }
    return *this;
  }
  LaurentPoly& operator-=(const LaurentPoly& o) { return *this += -o; }

  friend LaurentPoly operator+(LaurentPoly a, const LaurentPoly& b) {
    a += b;
    return a;
  }
  friend LaurentPoly operator-(LaurentPoly a, const LaurentPoly& b) {
    a -= b;
    return a;
  }
  friend LaurentPoly operator*(const LaurentPoly& a, const LaurentPoly& b) {
    LaurentPoly r;
    for (auto& [ea, ca] : a.terms_)
      for (auto& [eb, cb] : b.terms_) {
        Exps e;
        for (int i = 0; i < N; ++i) e[i] = ea[i] + eb[i];
        auto it = r.terms_.find(e);
        if (it == r.terms_.end()) {
          ExactRational c = ca * cb;
          if (c != 0) r.terms_.emplace(e, c);
        } else {
          it->second += ca * cb;
          if (it->second == 0) r.terms_.erase(it);
        }
      }
    return r;
  }
  LaurentPoly& operator*=(const LaurentPoly& o) {
    *this = *this * o;
    return *this;
  }

  LaurentPoly pow(long k) const {
    if (k < 0)
      throw std::invalid_argument("LaurentPoly::pow: negative exponent");
    LaurentPoly acc(1), base = *this;
    while (k) {
      if (k & 1) acc *= base;
      base *= base;
      k >>= 1;
    }
    return acc;
  }

  // d/d(x_var)
  LaurentPoly derivative(int var) const {
    LaurentPoly r;
    for (auto& [e, c] : terms_) {
      if (e[var] == 0) continue;
      Exps d = e;
      d[var] -= 1;
      r.terms_[d] = c * ExactRational(e[var]);
    }
    return r;
  }

  // coefficient extraction: the sub-polynomial multiplying x_var^power
  LaurentPoly coefficient_of(int var, long power) const {
    LaurentPoly r;
    for (auto& [e, c] : terms_) {
      if (e[var] != power) continue;
      Exps d = e;
      d[var] = 0;
      r.terms_[d] = c;
    }
    return r;
  }

  long min_exponent(int var) const {
    if (terms_.empty()) return 0;
    long m = terms_.begin()->first[var];
    for (auto& [e, c] : terms_) m = std::min(m, e[var]);
    return m;
  }
  long max_exponent(int var) const {
    if (terms_.empty()) return 0;
    long m = terms_.begin()->first[var];
    for (auto& [e, c] : terms_) m = std::max(m, e[var]);
    return m;
  }

  Real evaluate(const std::array<Real, N>& x) const {
    Real acc(0l);
    for (auto& [e, c] : terms_) {
      Real t(c);
      for (int i = 0; i < N; ++i)
        if (e[i] != 0) t *= symsix::pow(x[i], e[i]);
      acc += t;
    }
    return acc;
  }

  BigComplex evaluate_c(const std::array<BigComplex, N>& x) const {
    BigComplex acc(0l);
    for (auto& [e, c] : terms_) {
      BigComplex t{Real(c), Real(0l)};
      for (int i = 0; i < N; ++i)
        if (e[i] != 0) t *= symsix::pow(x[i], e[i]);
      acc += t;
    }
    return acc;
  }

  std::string to_string(const std::array<std::string, N>& names) const {
    if (terms_.empty()) return "0";
    std::string s;
    for (auto& [e, c] : terms_) {
      if (!s.empty()) s += " + ";
      s += c.get_str();
      for (int i = 0; i < N; ++i)
        if (e[i] != 0) s += "*" + names[i] + "^" + std::to_string(e[i]);
    }
    return s;
  }

 private:
  std::map<Exps, ExactRational> terms_;
};

// Rational function as an unreduced fraction of Laurent polynomials.
template <int N>
class RatFunc {
 public:
  RatFunc() : num_(0), den_(1) {}
  /*implicit*/ RatFunc(LaurentPoly<N> n) : num_(std::move(n)), den_(1) {}
  /*implicit*/ RatFunc(const ExactRational& c) : num_(c), den_(1) {}
  /*implicit*/ RatFunc(long c) : num_(c), den_(1) {}
  RatFunc(LaurentPoly<N> n, LaurentPoly<N> d)
      : num_(std::move(n)), den_(std::move(d)) {
    if (den_.is_zero()) throw std::domain_error("RatFunc: zero denominator");
  }

  const LaurentPoly<N>& num() const { return num_; }
  const LaurentPoly<N>& den() const { return den_; }
  bool is_zero() const { return num_.is_zero(); }

  RatFunc inverse() const {
    if (num_.is_zero()) throw std::domain_error("RatFunc: inverting zero");
    return RatFunc(den_, num_);
  }

  friend RatFunc operator*(const RatFunc& a, const RatFunc& b) {
    return RatFunc(a.num_ * b.num_, a.den_ * b.den_);
  }
  friend RatFunc operator/(const RatFunc& a, const RatFunc& b) {
    return a * b.inverse();
  }
  friend RatFunc operator+(const RatFunc& a, const RatFunc& b) {
    return RatFunc(a.num_ * b.den_ + b.num_ * a.den_, a.den_ * b.den_);
  }
  friend RatFunc operator-(const RatFunc& a, const RatFunc& b) {
    return RatFunc(a.num_ * b.den_ - b.num_ * a.den_, a.den_ * b.den_);
  }
  friend RatFunc operator-(const RatFunc& a) { return RatFunc(-a.num_, a.den_); }

  // a/b == c/d  iff  a d == c b  (denominators are nonzero by construction)
  friend bool operator==(const RatFunc& a, const RatFunc& b) {
    return a.num_ * b.den_ == b.num_ * a.den_;
  }
  friend bool operator!=(const RatFunc& a, const RatFunc& b) {
    return !(a == b);
  }

 private:
  LaurentPoly<N> num_, den_;
};

// Exact constants of the form  sum_e q_e * pi^{e/2}: Laurent polynomials in a
// single variable standing for sqrt(pi).
using PiExact = LaurentPoly<1>;

inline PiExact pi_power_half(long e, const ExactRational& c = 1) {
  return PiExact::monomial(c, {e});
}

// Named distinctly from other ledger-to-number conversions: LaurentPoly<1>
// is a shared representation, so overloading on the alias would let a value
// in one ledger silently evaluate under another ledger's variable.
inline Real pi_to_real(const PiExact& p) {
  return p.evaluate({sqrt(const_pi())});
}

}  // namespace symsix
