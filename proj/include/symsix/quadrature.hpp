#pragma once

// Double-exponential quadrature: tanh-sinh on a finite interval and exp-sinh
// on a half line.  Node/weight generation avoids the catastrophic rounding of
// 1 - tanh(u) by working with delta = 2/(e^{2u}+1) directly, so abscissas
// never collapse onto the endpoints.  Levels halve the step until two
// consecutive refinements agree to the requested tolerance; failure to
// converge throws rather than returning a silently bad value.

#include "symsix/complexnum.hpp"

#include <stdexcept>

namespace symsix {

namespace quad_detail {

inline Real de_tmax(const Real& eps) {
  // The slowest-decaying node contributions behave like e^{-u},
  // u = (pi/2) sinh t (exp-sinh Jacobian near the finite endpoint, and
  // tanh-sinh against integrands as singular as x^{-1/2}).  Truncate once
  // u exceeds L + 50, L = ln(1/eps).
  Real L = -log(eps);
  return asinh((L + Real(50l)) * Real(2l) / const_pi());
}

}  // namespace quad_detail

// integral of f over (a, b), finite endpoints.  V = decltype(f(Real)).
template <typename F>
auto tanh_sinh(F&& f, const Real& a, const Real& b, const Real& eps)
    -> decltype(f(Real())) {
  using V = decltype(f(Real()));
  if (!(b > a)) throw std::invalid_argument("tanh_sinh: requires b > a");
  const Real pi_half = const_pi() / Real(2l);
  const Real c = (a + b) / Real(2l);
  const Real d = (b - a) / Real(2l);
  const Real tmax = quad_detail::de_tmax(eps);

  // contribution of the symmetric node pair at t >= 0
  auto pair_at = [&](const Real& t) -> V {
    Real u = pi_half * sinh(t);
    Real e2u = exp(u * Real(-2l));
    Real delta = Real(2l) * e2u / (Real(1l) + e2u);
    Real w = d * pi_half * cosh(t) * delta * (Real(2l) - delta);
    if (t.is_zero()) return f(c) * w;
    Real x_lo = a + d * delta;
    Real x_hi = b - d * delta;
    return (f(x_lo) + f(x_hi)) * w;
  };

  Real h(1l);
  V total = pair_at(Real(0l));
  for (long j = 1; Real(j) <= tmax; ++j) total += pair_at(Real(j));
  total = total * h;

  const int max_level = 12;
  V prev = total;
  for (int level = 1; level <= max_level; ++level) {
    h /= Real(2l);
    V fresh(0l);
    for (long j = 1;; j += 2) {
      Real t = Real(j) * h;
      if (t > tmax) break;
      fresh += pair_at(t);
    }
    total = prev * Real(ExactRational(1, 2)) + fresh * h;
    Real change = abs(total - prev);
    Real scale = max(abs(total), eps);
    if (level >= 3 && change <= eps * scale) return total;
    prev = total;
  }
  throw std::runtime_error("tanh_sinh: no convergence at max level");
}

// integral of f over (a, infinity) for integrands with (at least)
// exponential decay.
template <typename F>
auto exp_sinh(F&& f, const Real& a, const Real& eps)
    -> decltype(f(Real())) {
  using V = decltype(f(Real()));
  const Real pi_half = const_pi() / Real(2l);
  const Real tmax = quad_detail::de_tmax(eps);

  auto node_at = [&](const Real& t) -> V {
    Real u = pi_half * sinh(t);
    Real eu = exp(u);
    Real w = pi_half * cosh(t) * eu;
    return f(a + eu) * w;
  };

  Real h(1l);
  V total = node_at(Real(0l));
  for (long j = 1; Real(j) <= tmax; ++j)
    total += node_at(Real(j)) + node_at(Real(-j));
  total = total * h;

  const int max_level = 12;
  V prev = total;
  for (int level = 1; level <= max_level; ++level) {
    h /= Real(2l);
    V fresh(0l);
    for (long j = 1;; j += 2) {
      Real t = Real(j) * h;
      if (t > tmax) break;
      fresh += node_at(t) + node_at(-t);
    }
    total = prev * Real(ExactRational(1, 2)) + fresh * h;
    Real change = abs(total - prev);
    Real scale = max(abs(total), eps);
    if (level >= 3 && change <= eps * scale) return total;
    prev = total;
  }
  throw std::runtime_error("exp_sinh: no convergence at max level");
}

}  // namespace symsix
