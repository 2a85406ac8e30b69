#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "symsix/modforms.hpp"
#include "symsix/quadrature.hpp"
#include "test_util.hpp"

#include <cstdio>
#include <fstream>
#include <vector>

using namespace symsix;
using symsix_test::abs_err_d;
using symsix_test::rel_err_d;

namespace {

// divisor-power sum, by direct divisor enumeration (oracle)
ExactInteger sigma_oracle(long n, long e) {
  ExactInteger s(0);
  for (long d = 1; d <= n; ++d) {
    if (n % d) continue;
    ExactInteger dp;
    mpz_ui_pow_ui(dp.get_mpz_t(), static_cast<unsigned long>(d),
                  static_cast<unsigned long>(e));
    s += dp;
  }
  return s;
}

// coefficients 0..N of q * prod_{n=1..N} (1 - q^n)^24, by literal repeated
// polynomial multiplication (oracle; no sparse series, no squaring tricks)
std::vector<ExactInteger> delta_oracle(long N) {
  std::vector<ExactInteger> p(static_cast<std::size_t>(N) + 1, ExactInteger(0));
  p[0] = 1;
  for (long rep = 0; rep < 24; ++rep) {
    for (long n = 1; n <= N; ++n) {
      // multiply by (1 - q^n): in-place from the top
      for (long i = N; i >= n; --i) p[i] -= p[i - n];
    }
  }
  std::vector<ExactInteger> out(static_cast<std::size_t>(N) + 1,
                                ExactInteger(0));
  for (long i = 1; i <= N; ++i) out[i] = p[i - 1];
  return out;
}

}  // namespace

TEST_CASE("quadratic field elements: closed arithmetic and embeddings") {
  set_working_bits(256);
  std::vector<ExactInteger> sqrt5 = {ExactInteger(-5), ExactInteger(0),
                                     ExactInteger(1)};
  auto el = [&](long a, long b) {
    return NumberFieldElement::quadratic(sqrt5, ExactRational(a),
                                         ExactRational(b));
  };

  // (1 + r)(1 - r) = 1 - r^2 = -4 where r^2 = 5
  CHECK(el(1, 1) * el(1, -1) == NumberFieldElement(ExactRational(-4)));
  // inverse: (3 + r)(3 + r)^{-1} = 1
  NumberFieldElement x = el(3, 1);
  CHECK(x / x == NumberFieldElement(1));
  CHECK((NumberFieldElement(1) / x) * x == NumberFieldElement(1));
  // norm and trace of 3 + r: (3+r)(3-r) = 4, trace 6
  CHECK(x.field_norm() == ExactRational(4));
  CHECK(x.field_trace() == ExactRational(6));
  CHECK(x.galois_conjugate() == el(3, -1));
  CHECK(x + x.galois_conjugate() == NumberFieldElement(ExactRational(6)));

  // rationals promote into the field on contact
  CHECK(NumberFieldElement(ExactRational(2)) + el(0, 1) == el(2, 1));
  CHECK(NumberFieldElement(ExactRational(2)) * el(1, 3) == el(2, 6));
  CHECK(el(7, 0).is_rational());
  CHECK(el(7, 0).rational_value() == ExactRational(7));
  CHECK(el(7, 0) == NumberFieldElement(ExactRational(7)));
  CHECK(!el(7, 1).is_rational());
  CHECK_THROWS_AS(el(7, 1).rational_value(), std::domain_error);

  // embeddings are the two real roots, ordered: embedding 0 < embedding 1
  Real r0 = el(0, 1).embed(0), r1 = el(0, 1).embed(1);
  CHECK(r0 < r1);
  CHECK(abs_err_d(r1, sqrt(Real(5l))) < 1e-70);
  CHECK(abs_err_d(r0, -sqrt(Real(5l))) < 1e-70);
  CHECK(abs_err_d(el(3, 2).embed(1), Real(3l) + Real(2l) * sqrt(Real(5l))) <
        1e-70);

  // golden-ratio field: alpha^2 = alpha + 1
  std::vector<ExactInteger> fib = {ExactInteger(-1), ExactInteger(-1),
                                   ExactInteger(1)};
  NumberFieldElement phi =
      NumberFieldElement::quadratic(fib, ExactRational(0), ExactRational(1));
  CHECK(phi * phi == phi + NumberFieldElement(1));
  CHECK(abs_err_d(phi.embed(1),
                  (Real(1l) + sqrt(Real(5l))) / Real(2l)) < 1e-70);

  // error paths: division by zero, reducible polynomial, mixed fields
  CHECK_THROWS_AS(x / NumberFieldElement(ExactRational(0)),
                  std::domain_error);
  CHECK_THROWS_AS(x / el(0, 0), std::domain_error);
  std::vector<ExactInteger> reducible = {ExactInteger(-4), ExactInteger(0),
                                         ExactInteger(1)};
  CHECK_THROWS_AS(NumberFieldElement::quadratic(reducible, ExactRational(1),
                                                ExactRational(1)),
                  std::invalid_argument);
  std::vector<ExactInteger> complexpoly = {ExactInteger(1), ExactInteger(0),
                                           ExactInteger(1)};
  CHECK_THROWS_AS(NumberFieldElement::quadratic(complexpoly, ExactRational(1),
                                                ExactRational(1)),
                  std::invalid_argument);
  NumberFieldElement y =
      NumberFieldElement::quadratic(fib, ExactRational(1), ExactRational(1));
  CHECK_THROWS_AS(x + y, std::invalid_argument);
  CHECK_THROWS_AS(x * y, std::invalid_argument);
}

TEST_CASE("series generators match their divisor-sum and product oracles") {
  const long N = 48;
  QExpansion e4 = QExpansion::eisenstein(4, N);
  QExpansion e6 = QExpansion::eisenstein(6, N);
  CHECK(e4.weight() == 4);
  CHECK(e4.truncation() == N);
  CHECK(e4.coefficient(0) == ExactRational(1));
  CHECK(e6.coefficient(0) == ExactRational(1));
  for (long n = 1; n <= N; ++n) {
    CHECK(e4.coefficient(n) == ExactRational(240 * sigma_oracle(n, 3)));
    CHECK(e6.coefficient(n) == ExactRational(-504 * sigma_oracle(n, 5)));
  }
  // first values as printed in the classical tables
  CHECK(e4.coefficient(1) == ExactRational(240));
  CHECK(e4.coefficient(2) == ExactRational(2160));

  QExpansion dl = QExpansion::delta(N);
  CHECK(dl.weight() == 12);
  CHECK(dl.is_cuspidal());
  auto oracle = delta_oracle(N);
  for (long n = 0; n <= N; ++n)
    CHECK(dl.coefficient(n) == ExactRational(oracle[n]));
  CHECK(dl.coefficient(1) == ExactRational(1));
  CHECK(dl.coefficient(2) == ExactRational(-24));
  CHECK(dl.coefficient(3) == ExactRational(252));
  CHECK(dl.coefficient(4) == ExactRational(-1472));
  // multiplicativity at the first coprime pair comes out of the product
  CHECK(dl.coefficient(6) == dl.coefficient(2) * dl.coefficient(3));

  // ring structure ties the generators together: both sides of each identity
  // live in a one-dimensional space with matching leading coefficient
  QExpansion e8 = QExpansion::eisenstein(8, N);
  QExpansion e10 = QExpansion::eisenstein(10, N);
  QExpansion e14 = QExpansion::eisenstein(14, N);
  CHECK(e4 * e4 == e8);
  CHECK(e4 * e6 == e10);
  CHECK(e4 * e4 * e6 == e14);
  CHECK(e6 * e8 == e14);

  // the discriminant from the generator ring: (E4^3 - E6^2)/1728
  QExpansion diff = e4.pow(3) - e6.pow(2);
  CHECK(frac_q(1, 1728) * diff == dl);

  // arithmetic guards
  CHECK_THROWS_AS(e4 + e6, std::invalid_argument);
  CHECK_THROWS_AS(QExpansion::eisenstein(3, N), std::invalid_argument);
  CHECK_THROWS_AS(QExpansion::eisenstein(2, N), std::invalid_argument);
  CHECK_THROWS_AS(dl.coefficient(N + 1), std::out_of_range);
}

TEST_CASE("echelon basis: dimensions, leading deltas, integrality") {
  const long N = 24;
  // dimension table for the full spaces
  CHECK(modular_dim(0) == 1);
  CHECK(modular_dim(2) == 0);
  CHECK(modular_dim(4) == 1);
  CHECK(modular_dim(10) == 1);
  CHECK(modular_dim(12) == 2);
  CHECK(modular_dim(14) == 1);
  CHECK(modular_dim(16) == 2);
  CHECK(modular_dim(24) == 3);
  CHECK(modular_dim(26) == 2);
  CHECK(modular_dim(28) == 3);

  CHECK(victor_miller_basis(2, N).empty());
  CHECK_THROWS_AS(victor_miller_basis(5, N), std::invalid_argument);
  CHECK_THROWS_AS(victor_miller_basis(24, 2), std::invalid_argument);

  // weight 4: the single form is the weight-4 generator itself
  auto b4 = victor_miller_basis(4, N);
  REQUIRE(b4.size() == 1);
  CHECK(b4[0] == QExpansion::eisenstein(4, N));

  // weight 12: echelon head, and the cusp element is the discriminant
  auto b12 = victor_miller_basis(12, N);
  REQUIRE(b12.size() == 2);
  CHECK(b12[0].coefficient(0) == ExactRational(1));
  CHECK(b12[0].coefficient(1) == ExactRational(0));
  CHECK(b12[1] == QExpansion::delta(N));

  // every weight through 28: delta heads, and integral coefficients
  for (long k = 4; k <= 28; k += 2) {
    auto basis = victor_miller_basis(k, N);
    long d = modular_dim(k);
    REQUIRE(static_cast<long>(basis.size()) == d);
    for (long i = 0; i < d; ++i) {
      CHECK(basis[i].weight() == k);
      for (long j = 0; j < d; ++j)
        CHECK(basis[i].coefficient(j) ==
              ExactRational(i == j ? 1 : 0));
      for (long n = 0; n <= N; ++n)
        CHECK(basis[i].coefficient(n).get_den() == 1);
    }
  }
}

TEST_CASE("eigenforms: eigenvalues, multiplicativity, coefficient bounds") {
  set_working_bits(256);
  const long N = 40;

  CHECK(cusp_eigenforms(10, N).empty());
  CHECK(cusp_eigenforms(14, N).empty());
  CHECK_THROWS_AS(cusp_eigenforms(36, N), std::runtime_error);

  // weight 12: the discriminant form, straight from the product oracle
  auto f12 = cusp_eigenforms(12, N);
  REQUIRE(f12.size() == 1);
  auto oracle = delta_oracle(N);
  for (long n = 0; n <= N; ++n)
    CHECK(f12[0].a_exact(n) == NumberFieldElement(ExactRational(oracle[n])));
  CHECK(f12[0].a_exact(3).rational_value() == ExactRational(252));
  CHECK(f12[0].coefficient_field_degree() == 1);

  // one-dimensional weights: the eigenform equals the generator product
  // that spans the cusp space, normalized to leading coefficient one
  struct OneDim {
    long weight;
    long e4_pow, e6_pow;
  };
  for (const auto& cse : std::vector<OneDim>{
           {16, 1, 0}, {18, 0, 1}, {20, 2, 0}, {22, 1, 1}, {26, 2, 1}}) {
    auto fs = cusp_eigenforms(cse.weight, N);
    REQUIRE(fs.size() == 1);
    QExpansion prod = QExpansion::eisenstein(4, N).pow(cse.e4_pow) *
                      QExpansion::eisenstein(6, N).pow(cse.e6_pow) *
                      QExpansion::delta(N);
    for (long n = 0; n <= N; ++n)
      CHECK(fs[0].a_exact(n) ==
            NumberFieldElement(prod.coefficient(n)));
  }
  // the two stated second coefficients that feed the larger scenarios
  CHECK(cusp_eigenforms(18, 8)[0].a_exact(2).rational_value() ==
        ExactRational(-528));
  CHECK(cusp_eigenforms(16, 8)[0].a_exact(2).rational_value() ==
        ExactRational(216));

  // exact Hecke relations across distinct primes and prime powers
  for (long k : {12L, 16L, 18L, 20L, 22L}) {
    auto f = cusp_eigenforms(k, N)[0];
    ExactRational pk = ExactRational(ExactInteger(1) << (k - 1));
    ExactInteger three_k;
    mpz_ui_pow_ui(three_k.get_mpz_t(), 3, static_cast<unsigned long>(k - 1));
    auto a = [&](long n) { return f.a_exact(n).rational_value(); };
    CHECK(a(6) == a(2) * a(3));
    CHECK(a(10) == a(2) * a(5));
    CHECK(a(15) == a(3) * a(5));
    CHECK(a(36) == a(4) * a(9));
    CHECK(a(4) == a(2) * a(2) - pk);
    CHECK(a(8) == a(2) * a(4) - pk * a(2));
    CHECK(a(16) == a(2) * a(8) - pk * a(4));
    CHECK(a(9) == a(3) * a(3) - ExactRational(three_k));
    CHECK(a(27) == a(3) * a(9) - ExactRational(three_k) * a(3));
  }

  // weight 24: conjugate pair over a real quadratic field
  auto f24 = cusp_eigenforms(24, N);
  REQUIRE(f24.size() == 2);
  CHECK(f24[0].embedding() == 0);
  CHECK(f24[1].embedding() == 1);
  CHECK(f24[0].coefficient_field_degree() == 2);
  NumberFieldElement a2 = f24[0].a_exact(2);
  auto mp = a2.minimal_polynomial();
  REQUIRE(mp.size() == 3);
  CHECK(mp[2] == 1);
  // the eigenvalue is a genuine quadratic irrational with two real roots
  ExactInteger disc = mp[1] * mp[1] - 4 * mp[0];
  CHECK(disc > 0);
  CHECK(!mpz_perfect_square_p(disc.get_mpz_t()));
  // exact arithmetic in the field: same relations as above
  {
    const auto& f = f24[0];
    NumberFieldElement pk(ExactRational(ExactInteger(1) << 23));
    ExactInteger t3;
    mpz_ui_pow_ui(t3.get_mpz_t(), 3, 23);
    NumberFieldElement three_k{ExactRational(t3)};
    CHECK(f.a_exact(6) == f.a_exact(2) * f.a_exact(3));
    CHECK(f.a_exact(15) == f.a_exact(3) * f.a_exact(5));
    CHECK(f.a_exact(4) == f.a_exact(2) * f.a_exact(2) - pk);
    CHECK(f.a_exact(8) ==
          f.a_exact(2) * f.a_exact(4) - pk * f.a_exact(2));
    CHECK(f.a_exact(9) ==
          f.a_exact(3) * f.a_exact(3) - three_k);
    // the two embeddings really are the conjugate pair: conjugating the
    // element swaps which root each embedding sees
    CHECK(abs_err_d(f.a_exact(2).galois_conjugate().embed(1),
                    f.a_exact(2).embed(0)) < 1e-60);
    CHECK(abs_err_d(f24[0].a(2) + f24[1].a(2),
                    Real(f.a_exact(2).field_trace())) < 1e-60);
    NumberFieldElement tr = f.a_exact(2) + f.a_exact(2).galois_conjugate();
    CHECK(tr.is_rational());
    CHECK(tr.rational_value() == f.a_exact(2).field_trace());
  }
  // weight 28 also lands in a quadratic field
  auto f28 = cusp_eigenforms(28, 12);
  REQUIRE(f28.size() == 2);
  CHECK(f28[0].coefficient_field_degree() == 2);
  CHECK(f28[0].a_exact(6) == f28[0].a_exact(2) * f28[0].a_exact(3));

  // numeric coefficient bound at both embeddings: |a(p)| <= 2 p^{(k-1)/2}
  for (long k : {12L, 16L, 18L, 20L, 22L, 24L}) {
    for (const auto& f : cusp_eigenforms(k, N)) {
      for (long p : {2L, 3L, 5L, 7L, 11L, 13L}) {
        Real bound = Real(2l) * symsix::pow(Real(p), Real(k - 1) / Real(2l));
        CHECK(abs(f.a(p)) <= bound);
      }
    }
  }
}

TEST_CASE("complex evaluation: reality, leading decay, transformation law") {
  set_working_bits(256);
  const long N = 64;
  auto dl = cusp_eigenforms(12, N)[0];

  // on the imaginary axis the value is real and positive at height 1
  BigComplex at_i = evaluate(dl, BigComplex(Real(0l), Real(1l)));
  CHECK(std::abs(at_i.im.to_double()) < 1e-70);
  CHECK(at_i.re > Real(0l));

  // at height 10 the first term dominates; the relative deviation is the
  // second coefficient times the decay factor, pinned two-sided
  BigComplex high = evaluate(dl, BigComplex(Real(0l), Real(10l)));
  Real lead = exp(Real(-20l) * const_pi());
  Real dev = abs(high - BigComplex(lead)) / lead;
  CHECK(dev < Real(25l) * lead);
  CHECK(dev > Real(23l) * lead);

  // periodicity and the inversion law at a generic point:
  //   value(-1/tau) = tau^{weight} value(tau)
  BigComplex tau(Real(ExactRational(3, 10)), Real(ExactRational(11, 10)));
  BigComplex v = evaluate(dl, tau);
  CHECK(abs_err_d(evaluate(dl, tau + BigComplex(1l)), v) < 1e-60);
  BigComplex inv_tau = BigComplex(-1l) / tau;
  CHECK(abs_err_d(evaluate(dl, inv_tau), pow(tau, 12l) * v) < 1e-55);

  // same law for the weight-18 form used downstream
  auto f18 = cusp_eigenforms(18, N)[0];
  BigComplex v18 = evaluate(f18, tau);
  CHECK(abs_err_d(evaluate(f18, inv_tau), pow(tau, 18l) * v18) < 1e-52);

  // and for the non-cuspidal weight-4 generator through the raw-series path
  QExpansion e4 = QExpansion::eisenstein(4, N);
  Real C(300l);
  BigComplex w = evaluate_expansion(e4, tau, Real(1e-50), C, 4);
  BigComplex w_inv = evaluate_expansion(e4, inv_tau, Real(1e-50), C, 4);
  CHECK(abs_err_d(w_inv, pow(tau, 4l) * w) < 1e-45);

  // error paths: boundary height, insufficient truncation, dishonest bound
  CHECK_THROWS_AS(evaluate(dl, BigComplex(Real(ExactRational(1, 2)))),
                  std::domain_error);
  CHECK_THROWS_AS(evaluate(dl, BigComplex(Real(0l), Real(-1l))),
                  std::domain_error);
  auto dl_short = cusp_eigenforms(12, 6)[0];
  CHECK_THROWS_AS(
      evaluate(dl_short, BigComplex(Real(0l), Real(ExactRational(1, 100)))),
      std::runtime_error);
  CHECK_THROWS_AS(
      evaluate_expansion(e4, tau, Real(1e-50), Real(ExactRational(1, 10)), 0),
      std::invalid_argument);
}

TEST_CASE("petersson norms: positivity, scaling, stability, cross-check") {
  set_working_bits(256);
  const Real eps(1e-30);

  auto dl64 = cusp_eigenforms(12, 64)[0];
  Real n64 = petersson_norm(dl64, eps);
  CHECK(n64 > Real(0l));
  // magnitude window around the classical size of the discriminant norm
  CHECK(n64.to_double() > 5e-7);
  CHECK(n64.to_double() < 5e-6);

  // truncation independence once the tail is certified
  auto dl48 = cusp_eigenforms(12, 48)[0];
  Real n48 = petersson_norm(dl48, eps);
  CHECK(abs_err_d(n48, n64) < 1e-25);

  // sesquilinear scaling through the raw-expansion route
  {
    const long N = 48;
    QExpansion d1 = QExpansion::delta(N);
    QExpansion d2 = ExactRational(2) * d1;
    Real base = petersson_norm_expansion(d1, eps, Real(2l), 7);
    Real twice = petersson_norm_expansion(d2, eps, Real(4l), 7);
    CHECK(rel_err_d(twice, Real(4l) * base) < 1e-28);
    CHECK(abs_err_d(base, n48) < 1e-25);
  }

  // non-cuspidal input is rejected
  CHECK_THROWS_AS(petersson_norm_expansion(QExpansion::eisenstein(4, 48), eps,
                                           Real(300l), 4),
                  std::domain_error);

  // independent cross-check: plain midpoint grid over the same region,
  // columns starting exactly on the unit-circle arc, capped at height 5
  {
    auto f = cusp_eigenforms(12, 48)[0];
    const long N = f.truncation();
    std::vector<Real> a(static_cast<std::size_t>(N) + 1);
    for (long n = 0; n <= N; ++n) a[n] = f.a(n);
    const long nx = 200, ny = 300;
    const Real hx = Real(ExactRational(1, 2)) / Real(nx);
    const Real two_pi = Real(2l) * const_pi();
    Real grid(0l);
    for (long ix = 0; ix < nx; ++ix) {
      Real x = (Real(ix) + Real(ExactRational(1, 2))) * hx;
      Real y0 = sqrt(Real(1l) - x * x);
      Real hy = (Real(5l) - y0) / Real(ny);
      Real col(0l);
      for (long iy = 0; iy < ny; ++iy) {
        Real y = y0 + (Real(iy) + Real(ExactRational(1, 2))) * hy;
        BigComplex t = exp(BigComplex(-two_pi * y, two_pi * x));
        BigComplex s(0l);
        for (long n = N; n >= 1; --n) s = s * t + BigComplex(a[n]);
        s = s * t;
        col += norm_sq(s) * symsix::pow(y, 10l);
      }
      grid += col * hy;
    }
    grid = grid * hx * Real(2l);  // mirror image in x
    Real oracle = Real(3l) / const_pi() * grid;
    CHECK(rel_err_d(oracle, n48) < 1e-3);
  }

  // norms exist and are positive for the other forms used downstream
  Real n16 = petersson_norm(cusp_eigenforms(16, 64)[0], eps);
  Real n18 = petersson_norm(cusp_eigenforms(18, 64)[0], eps);
  CHECK(n16 > Real(0l));
  CHECK(n18 > Real(0l));
  auto f24 = cusp_eigenforms(24, 64);
  Real n24a = petersson_norm(f24[0], eps);
  Real n24b = petersson_norm(f24[1], eps);
  CHECK(n24a > Real(0l));
  CHECK(n24b > Real(0l));
  CHECK(abs_err_d(n24a, n24b) > 1e-12);  // genuinely different embeddings
}

TEST_CASE("coefficient cache: exact round trip and validation") {
  set_working_bits(256);
  const std::string dir = "/tmp/symsix_cache_test";
  std::remove((dir + "_w12.json").c_str());
  std::remove((dir + "_w24.json").c_str());

  auto f12 = cusp_eigenforms(12, 20)[0];
  save_coefficient_cache(dir + "_w12.json", f12);
  Eigenform r12 = load_coefficient_cache(dir + "_w12.json");
  CHECK(r12.weight() == 12);
  CHECK(r12.truncation() == f12.truncation());
  CHECK(r12.embedding() == 0);
  for (long n = 0; n <= f12.truncation(); ++n)
    CHECK(r12.a_exact(n) == f12.a_exact(n));

  auto f24 = cusp_eigenforms(24, 20);
  save_coefficient_cache(dir + "_w24.json", f24[1]);
  Eigenform r24 = load_coefficient_cache(dir + "_w24.json");
  CHECK(r24.weight() == 24);
  CHECK(r24.embedding() == 1);
  CHECK(r24.coefficient_field_degree() == 2);
  for (long n = 0; n <= f24[1].truncation(); ++n)
    CHECK(r24.a_exact(n) == f24[1].a_exact(n));
  CHECK(abs_err_d(r24.a(2), f24[1].a(2)) < 1e-70);

  // malformed input fails loudly
  {
    std::ofstream bad(dir + "_bad.json");
    bad << "{ not json";
  }
  CHECK_THROWS(load_coefficient_cache(dir + "_bad.json"));
  CHECK_THROWS(load_coefficient_cache(dir + "_missing.json"));
  {
    std::ofstream bad(dir + "_bad2.json");
    bad << "{\"weight\": 12, \"embedding\": 0, \"field_poly\": [\"0\",\"1\"], "
           "\"coeffs\": [[\"0\",\"0\"]]}";
  }
  CHECK_THROWS(load_coefficient_cache(dir + "_bad2.json"));
}
