#pragma once

// Half-integral-weight forms on the theta group, index-one Jacobi forms via
// their theta decomposition, a weight-raising differential operator in the
// elliptic variable, Maass-Shimura operators on nearly holomorphic forms,
// and Petersson pairings on the full modular group and on the level-four
// congruence subgroup.
//
// Conventions used throughout:
//   - An index-one Jacobi form F(tau, z) of even weight k decomposes as
//     F = h0 * theta0 + h1 * theta1 with theta_mu(tau, z) the weight-1/2
//     index-one theta functions (lattice residue mu mod 2).  The components
//     h_mu are series in q^{1/4}; their coefficients are stored on the
//     quarter-exponent grid: index j holds the coefficient of q^{j/4}.
//   - The associated half-integral form of weight k - 1/2 on the level-four
//     group is h(tau) = h0(4 tau) + h1(4 tau) = sum c(n) q^n, supported on
//     n = 0, 3 mod 4 ("plus space" support).
//   - Nearly holomorphic forms are finite sums  sum_m g_m(tau) (4 pi y)^{-m}
//     with g_m a q^{1/4}-grid expansion; m is called the depth index.

#include "symsix/modforms.hpp"

#include <map>
#include <tuple>
#include <utility>
#include <vector>

namespace symsix {

// ---------------------------------------------------------------------------
// Exact arithmetic inputs: Bernoulli-polynomial character sums.

// Generalized Bernoulli number attached to the real quadratic character of
// discriminant D (D a fundamental discriminant, or 1 for the trivial
// character): |D|^{r-1} * sum_{a=1..|D|} chi_D(a) B_r(a/|D|), exact.
ExactRational generalized_bernoulli(long r, long D);

// Value of the class-number-type series used for index-one Jacobi Eisenstein
// coefficients: for N = 0 this is zeta(1-2r) = -B_{2r}/(2r); for N > 0 with
// (-1)^r N = D f^2 (D fundamental) it is
//   L(1-r, chi_D) * sum_{d | f} mu(d) chi_D(d) d^{r-1} sigma_{2r-1}(f/d),
// and 0 whenever (-1)^r N is not congruent to 0 or 1 mod 4.
// Throws std::invalid_argument for r < 1 or N < 0.
ExactRational cohen_h(long r, long N);

// ---------------------------------------------------------------------------
// Half-integral plus-space expansions.

class PlusSpaceForm {
 public:
  // kappa >= 1; the form has weight kappa + 1/2.  coeffs[n] is the
  // coefficient of q^n; entries with n = 1, 2 mod 4 must be zero.
  PlusSpaceForm(long kappa, std::vector<ExactRational> coeffs);

  long kappa() const { return kappa_; }
  ExactRational half_weight() const { return frac_q(2 * kappa_ + 1, 2); }
  long truncation() const { return static_cast<long>(c_.size()) - 1; }
  const ExactRational& coefficient(long n) const;
  bool is_cuspidal() const;  // vanishing constant term

  const std::vector<ExactRational>& coefficients() const { return c_; }

  friend PlusSpaceForm operator*(const ExactRational& s,
                                 const PlusSpaceForm& h);

 private:
  long kappa_;
  std::vector<ExactRational> c_;
};

// Hecke operator at p^2 on the plus space: returns the coefficient sequence
//   c'(n) = c(p^2 n) + chi((-1)^kappa n) p^{kappa-1} c(n)
//                    + p^{2 kappa - 1} c(n / p^2),
// (chi the quadratic residue symbol mod p, last term only when p^2 | n),
// computable for n <= truncation / p^2.  Throws if p is not prime.
std::vector<ExactRational> plus_hecke_square(const PlusSpaceForm& h, long p);

// ---------------------------------------------------------------------------
// Index-one Jacobi forms, stored through their theta components.

class JacobiForm {
 public:
  // Component mu holds coefficients of q^{j/4}; support requires
  // j = -mu^2 mod 4, i.e. j = 0 mod 4 in h0 and j = 3 mod 4 in h1.
  // Both vectors must have equal length (the common truncation).
  JacobiForm(long weight, std::vector<ExactRational> h0,
             std::vector<ExactRational> h1);

  long weight() const { return weight_; }
  long index() const { return 1; }
  // Largest N such that every coefficient c(N') with N' <= N is stored.
  long truncation() const { return static_cast<long>(h0_.size()) - 1; }
  const std::vector<ExactRational>& theta_component(int mu) const;

  // Coefficient of q^n zeta^r; for index one this depends only on 4n - r^2
  // (and vanishes when that is negative).
  ExactRational coefficient(long n, long r) const;
  bool is_cuspidal() const;  // c(0) = 0

  friend JacobiForm operator+(const JacobiForm& a, const JacobiForm& b);
  friend JacobiForm operator-(const JacobiForm& a, const JacobiForm& b);
  friend JacobiForm operator*(const ExactRational& s, const JacobiForm& F);
  // Multiplication by an ordinary modular form (weights add).
  friend JacobiForm operator*(const QExpansion& f, const JacobiForm& F);

 private:
  long weight_;
  std::vector<ExactRational> h0_, h1_;
};

// Index-one Jacobi Eisenstein series of weight 4 or 6, exact coefficients,
// constant term 1, stored through truncation N (in c(N) units).
JacobiForm jacobi_eisenstein(long k, long N);

// Basis of the cusp subspace of weight-k index-one Jacobi forms, echelonized
// on the support indices 3, 4, 7, 8, ...; k >= 10 even (k = 8 gives an empty
// list).  Built from products of modular forms with the two Eisenstein
// generators above.
std::vector<JacobiForm> jacobi_cusp_space(long k, long N);

// The half-integral form of weight (k - 1/2) carried by the components.
PlusSpaceForm plus_form_from_jacobi(const JacobiForm& F);
// Inverse construction: redistributes plus-space coefficients onto the two
// theta components (weight becomes kappa + 1).
JacobiForm jacobi_from_plus(const PlusSpaceForm& h);

// ---------------------------------------------------------------------------
// Nearly holomorphic expansions.

class NearlyHolomorphicForm {
 public:
  // parts[m][j]: coefficient of q^{j/4} (4 pi y)^{-m}.  Trailing all-zero
  // parts are trimmed so depth() reflects the true inverse-y degree.
  NearlyHolomorphicForm(ExactRational weight,
                        std::vector<std::vector<ExactRational>> parts);

  // Depth-zero lift of an ordinary expansion (integer exponents move onto
  // the quarter grid).
  static NearlyHolomorphicForm holomorphic(const QExpansion& f);

  const ExactRational& weight() const { return weight_; }
  long depth() const { return static_cast<long>(parts_.size()) - 1; }
  const std::vector<std::vector<ExactRational>>& parts() const {
    return parts_;
  }
  bool is_zero() const;

  // The depth-m part as an integer-exponent coefficient list; throws
  // std::domain_error if that part has support off the integer grid.
  std::vector<ExactRational> integer_part(long m) const;

  friend NearlyHolomorphicForm operator*(const ExactRational& s,
                                         const NearlyHolomorphicForm& f);
  friend NearlyHolomorphicForm operator+(const NearlyHolomorphicForm& a,
                                         const NearlyHolomorphicForm& b);
  friend NearlyHolomorphicForm operator-(const NearlyHolomorphicForm& a,
                                         const NearlyHolomorphicForm& b);

 private:
  ExactRational weight_;
  std::vector<std::vector<ExactRational>> parts_;
};

// ---------------------------------------------------------------------------
// The elliptic-variable raising operator.
//
// The operator acts on functions of (tau, z) as
//   (2i/pi) ( d/dz + 4 pi i (z - zbar) / (tau - taubar) ).
// Its iterates live in the algebra of finite sums
//   a_{k,l,m}(tau) z^k zbar^l (tau - taubar)^{-m};
// internally each monomial is stored against the rescaled generators
//   A = 2 pi i z,  B = 2 pi i zbar,  W = (4 pi y)^{-1},
// which are fixed complex-scalar multiples of the monomials above and keep
// every series coefficient an exact rational: in these variables the
// operator reads  -4 d/dA + 8 (A - B) W,  and a theta term q^{r^2/4} zeta^r
// is the eigenfunction e^{rA} q^{r^2/4} of d/dA.

class OperatorExpansion {
 public:
  // Start from an index-one Jacobi form (one term per theta frequency r).
  explicit OperatorExpansion(const JacobiForm& F);

  long weight() const { return weight_; }

  // The two summands of the raising operator and their sum.  Each returns a
  // new expansion; apply() raises the tracked weight by one.
  OperatorExpansion scaled_z_derivative() const;   // -4 d/dA
  OperatorExpansion cross_multiply() const;        // 8 (A - B) W
  OperatorExpansion apply() const;                 // sum of the two

  // Restrict z = zbar = 0: keep monomials with k = l = 0 and sum the theta
  // frequencies.  The result has weight weight() and quarter-grid parts.
  NearlyHolomorphicForm restrict_elliptic() const;

  bool operator==(const OperatorExpansion& other) const;

 private:
  OperatorExpansion() = default;
  void prune();
  // key (k, l, m) -> (theta frequency r -> quarter-grid series)
  using TermMap =
      std::map<std::tuple<int, int, int>,
               std::map<long, std::vector<ExactRational>>>;
  long weight_ = 0;
  TermMap terms_;
};

// Apply the raising operator power times to F and restrict to z = 0.
// Result: weight F.weight() + power, depth at most floor(power / 2);
// odd powers give the zero form (the theta frequencies cancel in pairs).
NearlyHolomorphicForm delta_power_restrict(const JacobiForm& F, long power);

// Maass-Shimura raising: one step sends sum g_m W^m at weight w to
//   sum [ (theta_q g_m) W^m + (m - w) g_m W^{m+1} ],
// where theta_q multiplies the q^{j/4} coefficient by j/4; steps are chained
// with the weight increasing by two each time.
NearlyHolomorphicForm maass_shimura_apply(const NearlyHolomorphicForm& f,
                                          long steps);

// Triangular inversion of the raising ladder: writes f of weight w, depth d,
// as  sum_{p=0..d} (p-fold Maass-Shimura raise of u_p at weight w - 2p)
// and returns the quarter-grid expansions u_0 ... u_d.  Throws
// std::invalid_argument when a ladder constant vanishes (w integral in
// [p+1, 2p] for some p), std::logic_error if the peel fails to terminate.
std::vector<std::vector<ExactRational>> raising_decomposition(
    const NearlyHolomorphicForm& f);

// ---------------------------------------------------------------------------
// Evaluation.

// Direct evaluation from the theta decomposition; requires Im tau >= 1/2 and
// |Im z| <= 5 Im(tau)/4 so the lattice sum decays, else std::domain_error.
BigComplex evaluate_jacobi(const JacobiForm& F, const BigComplex& tau,
                           const BigComplex& z);

// Evaluate sum_m g_m(tau) (4 pi y)^{-m} at tau in the upper half-plane.
BigComplex evaluate_nearly(const NearlyHolomorphicForm& f,
                           const BigComplex& tau);

// Evaluate the half-integral form h(w) = h0(4w) + h1(4w) anywhere in the
// upper half-plane.  The component vector is transported to the standard
// fundamental domain with the theta-group automorphy (translation twists the
// odd component by a fourth root of unity; inversion mixes the components
// through the unitary matrix [[1,1],[1,-1]]/sqrt(2) with the weight factor),
// so the series only ever converges at height >= sqrt(3)/2.
BigComplex evaluate_plus(const PlusSpaceForm& h, const BigComplex& w);

// ---------------------------------------------------------------------------
// Petersson pairings.

// Volume-normalized pairing over the full modular group between a cusp
// eigenform g and a nearly holomorphic form of the same integer weight:
//   (3/pi) Int n(tau) conj(g(tau)) y^{weight} dx dy / y^2,
// each (4 pi y)^{-m} part integrated with its own exact tail above height 2
// and an exactly x-integrated adaptive quadrature below.  The nearly
// holomorphic parts must live on the integer exponent grid.
BigComplex pairing_sl2z(const Eigenform& g, const NearlyHolomorphicForm& n,
                        const Real& eps);
BigComplex pairing_sl2z(const Eigenform& g, const NearlyHolomorphicForm& n);

// Volume-normalized pairing of two plus-space forms of equal weight over the
// level-four group, computed as the sum of six coset translates of the
// standard fundamental domain divided by the total volume 2 pi.
BigComplex petersson_gamma04(const PlusSpaceForm& h1, const PlusSpaceForm& h2,
                             const Real& eps);
BigComplex petersson_gamma04(const PlusSpaceForm& h1,
                             const PlusSpaceForm& h2);

}  // namespace symsix
