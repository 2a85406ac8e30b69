#pragma once

// Exact archimedean structure constants for the discrete-series tensor model
// used by the degree-six central-value engine: the lowering operator on the
// tensor ladder, the holomorphic-vector recursion and its closed-form norms,
// the diagonal matrix-coefficient integral, the archimedean gamma-factor
// ratio, the assembled local period constant, and the raised-Gaussian /
// Hermite computations.  Everything that can be exact is exact: scalars are
// rationals times a power of sqrt(2*pi) carried symbolically, and numbers
// only materialize when a quadrature cross-check asks for them.

#include "symsix/exactpoly.hpp"
#include "symsix/rational.hpp"
#include "symsix/real.hpp"

#include <map>
#include <string>
#include <utility>
#include <vector>

namespace symsix::arch {

// ---------------------------------------------------------------------------
// Scalar ledger: exact constants of the form  sum_e q_e * (2*pi)^{e/2}.
// The single Laurent variable stands for sqrt(2*pi); a monomial with
// exponent e therefore means (2*pi)^{e/2}.  Plain pi is (1/2)*(2*pi).
// ---------------------------------------------------------------------------
using TwoPiExact = LaurentPoly<1>;

inline TwoPiExact two_pi_half_power(long e, const ExactRational& c = 1) {
  return TwoPiExact::monomial(c, {e});
}

// c * pi^k as a ledger element: pi^k = (2*pi)^k * 2^{-k}.
TwoPiExact pi_power(long k, const ExactRational& c = 1);

Real to_real(const TwoPiExact& v);

// Quotient of two single-monomial ledger elements (throws if either side is
// not a monomial or the divisor is zero).
TwoPiExact monomial_quotient(const TwoPiExact& num, const TwoPiExact& den);

std::string to_string(const TwoPiExact& v);

// ---------------------------------------------------------------------------
// Weight bookkeeping for one real place.  kappa is the half-weight of the
// integral-weight form (weight 2*kappa), kappa_prime + 1 the weight of the
// other form.  The ladder length r is kappa - kappa_prime - 1 when
// kappa > kappa_prime ("unbalanced") and kappa_prime - kappa otherwise
// ("balanced").
// ---------------------------------------------------------------------------
enum class WeightCase { balanced, unbalanced };

struct WeightParams {
  long kappa = 0;
  long kappa_prime = 0;
  long r = 0;
  WeightCase wcase = WeightCase::balanced;

  static WeightParams unbalanced(long kappa, long kappa_prime);
  static WeightParams balanced(long kappa, long kappa_prime);
};

// ---------------------------------------------------------------------------
// Sparse vectors in the tensor ladder  span{ u_i (x) v_j : i even >= 0,
// j >= 0 }.  u_param is the lowest-weight parameter of the u-side ladder
// (kappa_prime in the unbalanced model).
// ---------------------------------------------------------------------------
struct TensorBasisVector {
  long u_param = 0;
  std::map<std::pair<long, long>, TwoPiExact> terms;

  void add_term(long i, long j, const TwoPiExact& c);
  bool is_zero() const { return terms.empty(); }
  bool operator==(const TensorBasisVector& o) const;
};

// Lowering operator on the tensor ladder:
//   u_i (x) v_j  ->  -(i/2) u_{i-2} (x) v_j  +  pi j (j-1) u_i (x) v_{j-2}.
TensorBasisVector act_lowering(const TensorBasisVector& v);

// Norm-squared of the basis tensor u_i (x) v_j in the normalization where
// the i = 0 vectors have norm 1:
//   (2pi)^{-i} * prod_{l even, 0 <= l <= i-2}
//                  (i-l) / ((i + 2*u_param - l)(j+l+1)(j+l+2)).
TwoPiExact tensor_norm_sq(long i, long j, long u_param);

// Sum of |coefficient|^2 * tensor_norm_sq over the support.
TwoPiExact vector_norm_sq(const TensorBasisVector& v);

// ---------------------------------------------------------------------------
// The holomorphic vector  v_hol = sum_{i even, 0 <= i <= r} c_i u_i (x)
// v_{r-i}  with c_0 = 1 and  c_{i+2} = 2*pi*(r-i)(r-i-1)/(i+2) * c_i ,
// the unique lowest-weight vector of the ladder: act_lowering kills it.
// ---------------------------------------------------------------------------
struct HolomorphicVector {
  WeightParams params;
  std::map<long, TwoPiExact> coeff;  // i -> c_i, i even
  TensorBasisVector vec;
};

HolomorphicVector solve_holomorphic_vector(const WeightParams& params);

// Norm-squared of the holomorphic vector, computed as the explicit sum
// sum_i |c_i|^2 ||u_i (x) v_{r-i}||^2 and asserted equal to the closed form
// 2^{-r} C(2*kappa-2, r) / C(kappa-1, r); returns the closed form.
// Throws on mismatch.
ExactRational norm_holvec(const WeightParams& params);

// Balanced-case analog: evaluates
//   1 + sum_{l even >= 2} prod_{j even <= l-2} (r-j)(r-j-1)/((j+2)(2*kappa+j+1))
// exactly and asserts equality with 2^r C(r+kappa-1, r)/C(r+2*kappa-1, r);
// returns the closed form.  Throws on mismatch.
ExactRational norm_holvec_balanced(const WeightParams& params);

// ---------------------------------------------------------------------------
// Exact combinatorial identities behind the norm formulas.
// ---------------------------------------------------------------------------
struct AppendixReport {
  long cases_checked = 0;
  bool all_ok = true;
  std::string first_failure;  // empty iff all_ok
};

// alternating_pochhammer_sum: sum_{i=0}^{N} (-1)^i C(N,i) (z)_i / (w)_i,
// which should telescope to (w-z)_N / (w)_N for every rational z, w with
// (w)_N != 0.
ExactRational alternating_pochhammer_sum(long N, const ExactRational& z,
                                         const ExactRational& w);
bool pochhammer_identity_check(long N, const ExactRational& z,
                               const ExactRational& w);

// balanced_norm_sum / unbalanced_norm_sum: the two sum-form norms as exact
// rationals (the (2pi)-powers cancel inside), without the closed-form
// assertion.
ExactRational balanced_norm_sum(long r, long kappa);
ExactRational unbalanced_norm_sum(long r, long kappa_prime);

// Verifies the Pochhammer identity on a grid of rational (z, w) pairs and
// the two norm identities for 1 <= r <= max_r, 1 <= kappa (resp.
// kappa_prime) <= max_weight.  Stops recording after the first failure but
// keeps counting checks.
AppendixReport verify_appendix_identities(long max_r, long max_weight);

// ---------------------------------------------------------------------------
// Diagonal matrix-coefficient integral
//   int_0^inf (cosh t)^{-w} * 2*pi*sinh(2t) dt  =  4*pi/(w-2)   (w > 2),
// evaluated by double-exponential quadrature and asserted against the
// closed form to eps; returns the quadrature value.
// ---------------------------------------------------------------------------
Real cosh_matrix_coefficient_integral(const Real& w, const Real& eps);

// The closed form 4*pi/(w-2) as a ledger element for integer w.
TwoPiExact cosh_matrix_coefficient_closed(long w);

// ---------------------------------------------------------------------------
// Archimedean gamma-factor ratio
//   xi(2) * L(1/2, sym2 x pi) / (L(1, Ad pi) L(1, Ad tau))
// at one real place, built two ways and asserted equal:
//   (a) direct quotient of completed-factor values, using
//       Gamma_C(n) = 2 (2pi)^{-n} (n-1)!  and  Gamma_R(2) = 1/pi;
//   (b) the per-case closed form
//       (2pi)^{1-r} * r!/(2*kappa-1) * C(kappa-1,r)/C(2*kappa-2,r)   [unbal]
//       (2pi)^{1-r} * r!/(r+kappa)  * C(r+2*kappa-1,r)/C(r+kappa-1,r) [bal].
// Returns the common value.  Throws on mismatch.
// ---------------------------------------------------------------------------
TwoPiExact gamma_ratio_arch(const WeightParams& params);

// Same ratio evaluated numerically through the bignum Gamma (independent
// route for cross-validation).
Real gamma_ratio_arch_numeric(const WeightParams& params);

// ---------------------------------------------------------------------------
// Local period constant at a real place, assembled as
//   (gamma ratio)^{-1} * (cosh integral closed form) / (holomorphic norm),
// with the cosh exponent 2*kappa+1 (unbalanced) resp. 2*kappa_prime+2
// (balanced).  Asserted equal to the closed values
//   2^{2r+1} pi^r / r!   (unbalanced),      pi^r / r!   (balanced).
// Returns the exact ledger value.  Throws on mismatch.
// ---------------------------------------------------------------------------
TwoPiExact p_sharp_arch(const WeightParams& params);

// ---------------------------------------------------------------------------
// Raised Gaussian.  Polynomials in (x, pi) with exact rational coefficients;
// a GaussPoly P stands for the function P(x, pi) * exp(-2*pi*x^2).
// ---------------------------------------------------------------------------
using GaussPoly = LaurentPoly<2>;  // variable 0: x, variable 1: pi

// One application of the raising operator (2/pi) * (1/2 d/dx - 2*pi*x) to
// P * exp(-2*pi*x^2), returned as the new polynomial factor.
GaussPoly raise_once(const GaussPoly& P);

// One application of the derivative-only variant (2/pi) * (1/2 d/dx).
GaussPoly raise_once_derivative_only(const GaussPoly& P);

// L2 norm of P(x, pi) e^{-2 pi x^2} over the line, computed exactly via
// Gaussian moments  int x^{2m} e^{-4 pi x^2} dx = (2m-1)!! / (2 (8 pi)^m):
// the result is rational * pi^{pi_exp} ... returned as a GaussPoly with no
// x-dependence (exact, possibly several pi-powers for inhomogeneous P).
GaussPoly gauss_norm_sq_exact(const GaussPoly& P);

// Numeric value of P(x, pi) at rational x with pi materialized.
Real gauss_poly_eval(const GaussPoly& P, const ExactRational& x);

struct GaussianRaiseResult {
  long r = 0;

  // Exact r-fold iterate of the raising operator on the Gaussian.
  GaussPoly iterate;
  // Closed form the iterate actually equals:
  //   (2/pi)^r (-1)^r pi^{r/2} H_r(2 sqrt(pi) x).
  GaussPoly derived_form;
  // Reference closed form under verification:
  //   (2/pi)^r (-1)^r (pi/2)^{r/2} H_r(sqrt(2 pi) x).
  GaussPoly reference_form;
  // Exact r-fold iterate of the derivative-only operator; equals
  // reference_form identically, which pins where the reference values
  // come from.
  GaussPoly derivative_only_iterate;

  bool derived_matches_iterate = false;          // exact; expected true
  bool reference_matches_iterate = false;        // exact; true only at r = 0
  bool reference_matches_derivative_only = false;  // exact; expected true

  // Max relative deviation |iterate - reference| / max(1, |reference|)
  // over five sample points x in {1/10, 1/3, 1/2, 1, 7/5}.
  Real reference_pointwise_max_rel_err;

  // Exact norms: value = rational * pi^{-r}.
  ExactRational iterate_norm_sq;    // 2^{3r-1} r!      (times pi^{-r})
  ExactRational reference_norm_sq;  // (2r)!/(2 r!)     (times pi^{-r})
  ExactRational reference_over_iterate_norm;  // C(2r,r)/2^{3r} for r >= 1

  // Quadrature cross-check of the exact iterate norm.
  Real quad_rel_err_vs_iterate_norm;
};

GaussianRaiseResult gaussian_raise(long r, const Real& quad_eps);

}  // namespace symsix::arch
