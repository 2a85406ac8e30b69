#pragma once

// Level-one classical modular forms with exact rational q-expansions:
// Eisenstein series from Bernoulli numbers, the discriminant form from a
// sparse eta-cube product, an echelonized basis in every even weight, Hecke
// eigenforms by exact diagonalization of the weight's first Hecke operator,
// complex evaluation with a proven tail bound, and Petersson norms over the
// standard fundamental domain (adaptive compact cell below height 2, exact
// term-by-term exponential tail above).

#include "symsix/complexnum.hpp"
#include "symsix/rational.hpp"

#include <string>
#include <vector>

namespace symsix {

// Element of Q or of a real quadratic field Q(alpha), written over the power
// basis {1, alpha} with alpha a root of a monic integer quadratic.  Degree-1
// elements are plain rationals and promote silently into any quadratic field
// they meet in arithmetic; two distinct quadratic fields never mix.
class NumberFieldElement {
 public:
  // zero in Q
  NumberFieldElement() : coords_{ExactRational(0)} {}
  /*implicit*/ NumberFieldElement(const ExactRational& r) : coords_{r} {}
  /*implicit*/ NumberFieldElement(long n) : coords_{ExactRational(n)} {}

  // a + b*alpha where alpha is a root of x^2 + c1 x + c0, minpoly given as
  // {c0, c1, 1}.  Requires the polynomial to be monic, irreducible over Q,
  // and to have two real roots (positive discriminant).
  static NumberFieldElement quadratic(const std::vector<ExactInteger>& minpoly,
                                      const ExactRational& a,
                                      const ExactRational& b);

  long degree() const { return coords_.size() == 1 ? 1 : 2; }
  bool is_rational() const;
  ExactRational rational_value() const;  // throws unless is_rational()

  const std::vector<ExactRational>& coordinates() const { return coords_; }
  // {c0, c1, 1} for degree 2; {0, 1} (the polynomial x) for degree 1
  std::vector<ExactInteger> minimal_polynomial() const;

  // the nontrivial field automorphism alpha -> -c1 - alpha (identity on Q)
  NumberFieldElement galois_conjugate() const;
  ExactRational field_trace() const;
  ExactRational field_norm() const;

  // real embeddings ordered by the image of alpha: embedding 0 sends alpha
  // to (-c1 - sqrt(disc))/2, embedding 1 to (-c1 + sqrt(disc))/2.
  Real embed(int embedding) const;

  NumberFieldElement& operator+=(const NumberFieldElement& o);
  NumberFieldElement& operator-=(const NumberFieldElement& o);
  NumberFieldElement& operator*=(const NumberFieldElement& o);
  NumberFieldElement& operator/=(const NumberFieldElement& o);

  friend NumberFieldElement operator+(NumberFieldElement a,
                                      const NumberFieldElement& b) {
    a += b;
    return a;
  }
  friend NumberFieldElement operator-(NumberFieldElement a,
                                      const NumberFieldElement& b) {
    a -= b;
    return a;
  }
  friend NumberFieldElement operator*(NumberFieldElement a,
                                      const NumberFieldElement& b) {
    a *= b;
    return a;
  }
  friend NumberFieldElement operator/(NumberFieldElement a,
                                      const NumberFieldElement& b) {
    a /= b;
    return a;
  }
  friend NumberFieldElement operator-(const NumberFieldElement& a) {
    return NumberFieldElement() - a;
  }
  friend bool operator==(const NumberFieldElement& a,
                         const NumberFieldElement& b);
  friend bool operator!=(const NumberFieldElement& a,
                         const NumberFieldElement& b) {
    return !(a == b);
  }

 private:
  // size 1: {value}.  size 2: {a, b} over {1, alpha} with minpoly x^2+c1x+c0.
  std::vector<ExactRational> coords_;
  ExactInteger c0_{0}, c1_{0};

  static void promote(NumberFieldElement& x, const NumberFieldElement& like);
};

// Exact q-expansion of a level-one form: weight and rational coefficients
// indexed q^0 .. q^N.
class QExpansion {
 public:
  QExpansion(long weight, std::vector<ExactRational> coeffs);

  long weight() const { return weight_; }
  long truncation() const { return static_cast<long>(coeffs_.size()) - 1; }
  const ExactRational& coefficient(long n) const;
  bool is_cuspidal() const { return coeffs_.at(0) == 0; }

  // E_k = 1 - (2k/B_k) sum sigma_{k-1}(n) q^n, exact; k >= 4 even
  static QExpansion eisenstein(long k, long N);
  // weight-12 cusp form q prod (1-q^n)^24, via the sparse odd-square series
  // for the cube of the product and three squarings
  static QExpansion delta(long N);

  // same weight, truncations may differ (result keeps the shorter one)
  friend QExpansion operator+(const QExpansion& a, const QExpansion& b);
  friend QExpansion operator-(const QExpansion& a, const QExpansion& b);
  // weights add
  friend QExpansion operator*(const QExpansion& a, const QExpansion& b);
  friend QExpansion operator*(const ExactRational& c, const QExpansion& a);
  QExpansion pow(long e) const;

  friend bool operator==(const QExpansion& a, const QExpansion& b);

 private:
  long weight_;
  std::vector<ExactRational> coeffs_;
};

// dim of the full space of weight-k level-one forms (even k >= 0)
long modular_dim(long weight);

// Echelonized basis of the weight-k space: element i has coefficient
// delta_{ij} at q^j for j below the dimension.  Element 0 is the
// non-cuspidal one; elements 1.. span the cusp subspace.  Even weight
// required; weight 2 gives an empty list (the space is zero).  N must leave
// room for the echelon head (N >= dimension).
std::vector<QExpansion> victor_miller_basis(long weight, long N);

// Normalized Hecke eigenform: a(1) = 1, coefficients exact in Q or in a
// real quadratic field, one chosen real embedding.
class Eigenform {
 public:
  Eigenform(long weight, std::vector<NumberFieldElement> coeffs,
            int embedding);

  long weight() const { return weight_; }
  long truncation() const { return static_cast<long>(coeffs_.size()) - 1; }
  int embedding() const { return embedding_; }
  long coefficient_field_degree() const;

  const NumberFieldElement& a_exact(long n) const;
  Real a(long n) const;  // image under the chosen embedding

 private:
  long weight_;
  std::vector<NumberFieldElement> coeffs_;
  int embedding_;
};

// Hecke eigenbasis of the weight-k cusp subspace, by exact diagonalization
// of the first Hecke operator on the echelon basis.  Coefficients are exact;
// a quadratic eigenvalue yields the two conjugate forms as embeddings 0 and
// 1 of the same exact data.  The full eigen-identity
//   a(2n) + 2^{k-1} a(n/2) = a(2) a(n)
// is asserted internally for all n <= N.  Coefficient fields of degree
// above 2 are rejected.  Empty list when the cusp dimension is 0.
std::vector<Eigenform> cusp_eigenforms(long weight, long N);

// sum a(n) e^{2 pi i n tau} with the truncation tail certified below eps by
// the divisor-times-power coefficient bound |a(n)| <= n^{(k+1)/2}.  Throws
// std::domain_error off the upper half plane and std::runtime_error when the
// truncation cannot certify eps at this height.
BigComplex evaluate(const Eigenform& form, const BigComplex& tau,
                    const Real& eps);
BigComplex evaluate(const Eigenform& form, const BigComplex& tau);

// Same sum for a raw expansion (coefficient 0 included).  The caller supplies
// the coefficient growth bound |a(n)| <= C n^mu, which is verified on the
// known range before the tail is certified with it.
BigComplex evaluate_expansion(const QExpansion& f, const BigComplex& tau,
                              const Real& eps, const Real& tail_const,
                              long tail_power);

// Volume-normalized Petersson norm over the standard fundamental domain:
//   (3/pi) * integral |f(x+iy)|^2 y^{weight} dx dy / y^2.
// The domain is split at height 2: below, an adaptive quadrature in y of the
// exactly x-integrated trigonometric square; above, term-by-term integrals
// of the expansion square (each an explicit finite exponential sum).
// Positive for nonzero cusp forms; std::domain_error on non-cuspidal input.
Real petersson_norm(const Eigenform& form, const Real& eps);
Real petersson_norm(const Eigenform& form);
// Raw-expansion variant with the caller's growth bound (as above).
Real petersson_norm_expansion(const QExpansion& f, const Real& eps,
                              const Real& tail_const, long tail_power);

// Coefficient cache: JSON object {"weight", "embedding", "field_poly",
// "coeffs"} with exact integer strings, so the eigenform computation runs
// once per weight.  Loading re-validates the structural invariants.
void save_coefficient_cache(const std::string& path, const Eigenform& form);
Eigenform load_coefficient_cache(const std::string& path);

}  // namespace symsix
