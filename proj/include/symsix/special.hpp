#pragma once

// Special functions at arbitrary precision: complex log-Gamma/Gamma by
// Stirling's series with a recurrence shift into the reliable region,
// complex zeta by Euler-Maclaurin, completed Gamma factors, and Hermite
// polynomials (physicists' normalization).

#include "symsix/complexnum.hpp"
#include "symsix/rational.hpp"

#include <vector>

namespace symsix {

// log Gamma(z), principal determination continuous along the shift path.
// Throws std::domain_error at non-positive integers.
BigComplex log_gamma_complex(const BigComplex& z);

BigComplex gamma_complex(const BigComplex& z);

// Riemann zeta at complex s != 1 by Euler-Maclaurin.
BigComplex zeta_complex(const BigComplex& s);

// Archimedean Gamma factors and the completed zeta:
//   gamma_R(s) = pi^{-s/2} Gamma(s/2)
//   gamma_C(s) = 2 (2 pi)^{-s} Gamma(s)
//   xi_Q(s)    = gamma_R(s) zeta(s)
BigComplex gamma_R(const BigComplex& s);
BigComplex gamma_C(const BigComplex& s);
BigComplex xi_Q(const BigComplex& s);

// Physicists' Hermite polynomial H_r: coefficient list (degree 0..r, exact)
// and pointwise evaluation by the three-term recurrence.
std::vector<ExactInteger> hermite_coeffs(unsigned long r);
Real hermite_eval(unsigned long r, const Real& x);

}  // namespace symsix
