#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "symsix/halfint.hpp"
#include "symsix/modforms.hpp"
#include "symsix/quadrature.hpp"
#include "symsix/rational.hpp"
#include "test_util.hpp"

#include <algorithm>
#include <cstddef>
#include <functional>
#include <initializer_list>
#include <stdexcept>
#include <utility>
#include <vector>

using namespace symsix;
using symsix_test::abs_err_d;
using symsix_test::rel_err_d;

namespace {

// q-expansion of a rational Hecke eigenspace as exact coefficients
QExpansion eigen_expansion(const Eigenform& f) {
  std::vector<ExactRational> c(static_cast<std::size_t>(f.truncation()) + 1,
                               ExactRational(0));
  for (long n = 1; n <= f.truncation(); ++n)
    c[static_cast<std::size_t>(n)] = f.a_exact(n).rational_value();
  return QExpansion(f.weight(), std::move(c));
}

// two-variable series summed directly from the lattice coefficients
BigComplex jacobi_series_oracle(const JacobiForm& F, const BigComplex& tau,
                                const BigComplex& z) {
  const BigComplex two_pi_i(Real(0l), Real(2l) * const_pi());
  BigComplex q = exp(two_pi_i * tau);
  BigComplex zeta = exp(two_pi_i * z);
  BigComplex total(0l);
  long nmax = F.truncation() / 4;
  for (long n = nmax; n >= 0; --n) {
    BigComplex row(0l);
    for (long r = 0; r * r <= 4 * n; ++r) {
      ExactRational c = F.coefficient(n, r);
      if (c == 0) continue;
      if (r == 0)
        row += BigComplex(Real(c));
      else
        row += BigComplex(Real(c)) * (pow(zeta, r) + pow(zeta, -r));
    }
    total = total * q + row;
  }
  return total;
}

// plain one-variable q-series on the integer grid, with a certified early
// break once the remaining coefficients cannot matter
struct PlusSeries {
  std::vector<Real> c;
  Real cmax;
  explicit PlusSeries(const PlusSpaceForm& h) : cmax(0l) {
    c.reserve(static_cast<std::size_t>(h.truncation()) + 1);
    for (long n = 0; n <= h.truncation(); ++n) {
      c.push_back(Real(h.coefficient(n)));
      Real a = abs(c.back());
      if (a > cmax) cmax = a;
    }
  }
  BigComplex operator()(const BigComplex& w) const {
    const BigComplex two_pi_i(Real(0l), Real(2l) * const_pi());
    BigComplex q = exp(two_pi_i * w);
    Real aq = abs(q);
    BigComplex total(0l), qp(1l);
    Real apow(1l);
    Real gate = Real(1e-42) * (Real(1l) - aq);
    for (std::size_t n = 0; n < c.size(); ++n) {
      if (!c[n].is_zero()) total += BigComplex(c[n]) * qp;
      qp = qp * q;
      apow = apow * aq;
      if (cmax * apow < gate) break;
    }
    return total;
  }
};

// fourth-order Wirtinger derivative from eight nearby samples
template <typename G>
BigComplex wirtinger_d(G&& g, const BigComplex& at, const Real& h) {
  BigComplex rh(h, Real(0l));
  BigComplex ih(Real(0l), h);
  BigComplex two(2l), eight(8l);
  Real twelve_h = Real(12l) * h;
  BigComplex dx = (g(at - rh * two) - g(at + rh * two) +
                   (g(at + rh) - g(at - rh)) * eight) /
                  twelve_h;
  BigComplex dy = (g(at - ih * two) - g(at + ih * two) +
                   (g(at + ih) - g(at - ih)) * eight) /
                  twelve_h;
  return (dx - BigComplex(Real(0l), Real(1l)) * dy) / Real(2l);
}

// nested numeric application of the elliptic-variable raising operator,
// entirely by finite differences of the two-variable evaluation
BigComplex numeric_delta_power(const JacobiForm& F, const BigComplex& tau,
                               long power, const Real& h) {
  std::function<BigComplex(const BigComplex&)> level =
      [&F, &tau](const BigComplex& z) { return evaluate_jacobi(F, tau, z); };
  const BigComplex two_i_over_pi(Real(0l), Real(2l) / const_pi());
  const BigComplex four_pi_i(Real(0l), Real(4l) * const_pi());
  for (long step = 0; step < power; ++step) {
    auto prev = level;
    level = [prev, &tau, two_i_over_pi, four_pi_i,
             h](const BigComplex& z) -> BigComplex {
      BigComplex dz = wirtinger_d(prev, z, h);
      BigComplex mult = four_pi_i * (z - conj(z)) / (tau - conj(tau));
      return two_i_over_pi * (dz + mult * prev(z));
    };
  }
  return level(BigComplex(0l));
}

// independent level-four norm: integrate |h|^2 Im^s over the width-one strip
// lying above the two radius-1/4 circles tangent to the real axis at 0 and
// +-1/2 (the region is symmetric in x, so only x > 0 is integrated).  Uses
// the plain q-series, no component transport.  The omitted cusp wedges below
// the height cut are bounded by boundary samples: beneath its turning height
// the integrand decreases monotonically toward the real axis, so cut-line
// values dominate the wedge up to a margin.
Real ford_domain_integral(const PlusSpaceForm& h, const Real& eps) {
  PlusSeries series(h);
  Real s = Real(2 * h.kappa() + 1) / Real(2l);
  auto density = [&](const Real& x, const Real& y) -> Real {
    BigComplex v = series(BigComplex(x, y));
    return norm_sq(v) * pow(y, s) / (y * y);
  };
  const Real half(ExactRational(1, 2));
  const Real quarter(ExactRational(1, 4));
  const Real cut(ExactRational(35, 1000));
  const Real top(ExactRational(16, 5));
  auto xslice = [&](const Real& y) -> Real {
    auto f = [&](const Real& x) { return density(x, y); };
    if (y >= quarter) return tanh_sinh(f, Real(0l), half, eps);
    Real root = sqrt(quarter - Real(4l) * y * y);
    Real xlo = (half - root) / Real(2l);
    Real xhi = (half + root) / Real(2l);
    return tanh_sinh(f, Real(0l), xlo, eps) + tanh_sinh(f, xhi, half, eps);
  };
  Real total = tanh_sinh(xslice, cut, Real(ExactRational(1, 10)), eps) +
               tanh_sinh(xslice, Real(ExactRational(1, 10)), quarter, eps) +
               tanh_sinh(xslice, quarter, Real(1l), eps) +
               tanh_sinh(xslice, Real(1l), top, eps);
  total = Real(2l) * total;
  // cut certificate: sampled boundary values times a ten-fold margin and the
  // wedge area must stay far below the quadrature target
  Real corner(0l);
  for (double xs : {0.001, 0.002, 0.498, 0.499})
    corner = max(corner, density(Real(xs), cut));
  Real omitted = corner * Real(10l) * cut * Real(ExactRational(1, 100));
  if (!(omitted <= Real(ExactRational(1, 1000000)) * total))
    throw std::runtime_error("fundamental-domain oracle: cut not negligible");
  // above the top height the strip slice is already exponentially small
  if (!(xslice(top) <= Real(ExactRational(1, 1000000)) * total))
    throw std::runtime_error("fundamental-domain oracle: top not negligible");
  return total;
}

}  // namespace

TEST_CASE("generalized Bernoulli numbers and the half-integral series") {
  set_working_bits(256);
  CHECK(generalized_bernoulli(1, -4) == frac_q(-1, 2));
  CHECK(generalized_bernoulli(5, -4) == frac_q(-25, 2));
  CHECK(generalized_bernoulli(3, -3) == frac_q(2, 3));
  CHECK(cohen_h(3, 0) == frac_q(-1, 252));
  CHECK(cohen_h(5, 0) == frac_q(-1, 132));
  CHECK(cohen_h(3, 1) == 0);
  CHECK(cohen_h(3, 2) == 0);
  CHECK(cohen_h(3, 3) == frac_q(-2, 9));
  CHECK(cohen_h(3, 4) == frac_q(-1, 2));
  CHECK(cohen_h(3, 7) == frac_q(-16, 7));
  CHECK(cohen_h(3, 8) == ExactRational(-3));
  CHECK(cohen_h(3, 12) == frac_q(-74, 9));
  CHECK(cohen_h(5, 3) == frac_q(2, 3));
  CHECK(cohen_h(5, 4) == frac_q(5, 2));
  CHECK_THROWS_AS(cohen_h(0, 3), std::invalid_argument);
  CHECK_THROWS_AS(cohen_h(3, -1), std::invalid_argument);
  CHECK_THROWS_AS(generalized_bernoulli(0, -4), std::invalid_argument);
  CHECK_THROWS_AS(generalized_bernoulli(2, 0), std::invalid_argument);
}

TEST_CASE("index-one Eisenstein components: frozen rational values") {
  set_working_bits(256);
  JacobiForm e41 = jacobi_eisenstein(4, 16);
  const auto& h0 = e41.theta_component(0);
  const auto& h1 = e41.theta_component(1);
  CHECK(h0[0] == ExactRational(1));
  CHECK(h1[3] == ExactRational(56));
  CHECK(h0[4] == ExactRational(126));
  CHECK(h1[7] == ExactRational(576));
  CHECK(h0[8] == ExactRational(756));
  CHECK(h0[12] == ExactRational(2072));
  CHECK(h0[1] == 0);
  CHECK(h0[5] == 0);
  CHECK(h1[2] == 0);
  CHECK(e41.coefficient(1, 0) == ExactRational(126));
  CHECK(e41.coefficient(1, 1) == ExactRational(56));
  CHECK(e41.coefficient(1, -1) == ExactRational(56));
  CHECK(e41.coefficient(1, -2) == ExactRational(1));
  CHECK(e41.coefficient(0, 1) == 0);
  CHECK(e41.weight() == 4);
  CHECK(e41.index() == 1);
  CHECK(!e41.is_cuspidal());
  JacobiForm e61 = jacobi_eisenstein(6, 8);
  CHECK(e61.theta_component(0)[0] == ExactRational(1));
  CHECK(e61.theta_component(1)[3] == ExactRational(-88));
  CHECK(e61.theta_component(0)[4] == ExactRational(-330));
  CHECK_THROWS_AS(jacobi_eisenstein(5, 48), std::invalid_argument);
}

TEST_CASE("cusp subspaces of index-one forms: dimensions and generators") {
  set_working_bits(256);
  CHECK(jacobi_cusp_space(8, 16).empty());
  auto w10 = jacobi_cusp_space(10, 48);
  auto w12 = jacobi_cusp_space(12, 48);
  REQUIRE(w10.size() == 1);
  REQUIRE(w12.size() == 1);
  CHECK(w10[0].is_cuspidal());
  // the weight-ten generator is the normalized Eisenstein bracket
  JacobiForm e41 = jacobi_eisenstein(4, 48);
  JacobiForm e61 = jacobi_eisenstein(6, 48);
  QExpansion e4 = QExpansion::eisenstein(4, 12);
  QExpansion e6 = QExpansion::eisenstein(6, 12);
  JacobiForm phi10 = frac_q(1, 144) * (e6 * e41 - e4 * e61);
  CHECK(w10[0].theta_component(0) == phi10.theta_component(0));
  CHECK(w10[0].theta_component(1) == phi10.theta_component(1));
  CHECK(w10[0].coefficient(1, 1) == ExactRational(1));
  CHECK(w10[0].coefficient(1, 0) == ExactRational(-2));
  // weight twelve: bracket of the two Eisenstein products
  JacobiForm phi12 = frac_q(1, 144) * (e4 * (e4 * e41) - e6 * e61);
  CHECK(w12[0].theta_component(0) == phi12.theta_component(0));
  CHECK(w12[0].theta_component(1) == phi12.theta_component(1));
  CHECK(w12[0].coefficient(1, 1) == ExactRational(1));
  CHECK(w12[0].coefficient(1, 0) == ExactRational(10));
  CHECK_THROWS_AS(jacobi_cusp_space(9, 48), std::invalid_argument);
}

TEST_CASE("theta decomposition reconstructs the two-variable series") {
  set_working_bits(256);
  JacobiForm e41 = jacobi_eisenstein(4, 60);
  JacobiForm gen = jacobi_cusp_space(10, 60)[0];
  const BigComplex pts[5][2] = {
      {BigComplex(Real(0.13), Real(1.21)), BigComplex(Real(0.21), Real(0.11))},
      {BigComplex(Real(-0.37), Real(1.45)),
       BigComplex(Real(-0.33), Real(-0.08))},
      {BigComplex(Real(0.5), Real(2l)), BigComplex(Real(0.05), Real(0.3))},
      {BigComplex(Real(0.05), Real(1.12)), BigComplex(Real(0.4), Real(-0.12))},
      {BigComplex(Real(-0.49), Real(1.3)), BigComplex(Real(-0.27), Real(0.2))}};
  for (const auto& p : pts) {
    CHECK(rel_err_d(evaluate_jacobi(e41, p[0], p[1]),
                    jacobi_series_oracle(e41, p[0], p[1])) <= 1e-12);
    CHECK(rel_err_d(evaluate_jacobi(gen, p[0], p[1]),
                    jacobi_series_oracle(gen, p[0], p[1])) <= 1e-12);
  }
}

TEST_CASE("two-variable transformation laws at sample points") {
  set_working_bits(256);
  JacobiForm e41 = jacobi_eisenstein(4, 160);
  BigComplex tau(Real(0.3), Real(1.37));
  BigComplex z(Real(0.11), Real(0.06));
  const BigComplex two_pi_i(Real(0l), Real(2l) * const_pi());
  BigComplex base = evaluate_jacobi(e41, tau, z);
  // periodicity in both variables
  CHECK(rel_err_d(evaluate_jacobi(e41, tau + BigComplex(1l), z), base) <=
        1e-12);
  CHECK(rel_err_d(evaluate_jacobi(e41, tau, z + BigComplex(1l)), base) <=
        1e-12);
  // lattice translation of the elliptic variable
  BigComplex efac =
      exp(BigComplex(-1l) * two_pi_i * (tau + z * BigComplex(2l)));
  CHECK(rel_err_d(evaluate_jacobi(e41, tau, z + tau), efac * base) <= 1e-12);
  // modular inversion
  BigComplex itau = BigComplex(-1l) / tau;
  BigComplex iz = z / tau;
  BigComplex rhs = pow(tau, 4l) * exp(two_pi_i * z * z / tau) * base;
  CHECK(rel_err_d(evaluate_jacobi(e41, itau, iz), rhs) <= 1e-12);
  // the same laws for the cuspidal weight-ten generator
  JacobiForm gen = jacobi_cusp_space(10, 160)[0];
  BigComplex gbase = evaluate_jacobi(gen, tau, z);
  BigComplex grhs = pow(tau, 10l) * exp(two_pi_i * z * z / tau) * gbase;
  CHECK(rel_err_d(evaluate_jacobi(gen, itau, iz), grhs) <= 1e-12);
  CHECK(rel_err_d(evaluate_jacobi(gen, tau, z + tau), efac * gbase) <= 1e-12);
  // domain guards
  CHECK_THROWS_AS(evaluate_jacobi(e41, BigComplex(Real(0l), Real(0.3)), z),
                  std::domain_error);
  CHECK_THROWS_AS(evaluate_jacobi(e41, BigComplex(Real(0l), Real(1l)),
                                  BigComplex(Real(0l), Real(2l))),
                  std::domain_error);
}

TEST_CASE("plus-space support, round trips, and scalar action") {
  set_working_bits(256);
  JacobiForm e41 = jacobi_eisenstein(4, 16);
  PlusSpaceForm h = plus_form_from_jacobi(e41);
  CHECK(h.kappa() == 3);
  CHECK(h.half_weight() == frac_q(7, 2));
  CHECK(h.truncation() == 16);
  CHECK(h.coefficient(3) == ExactRational(56));
  CHECK(h.coefficient(4) == ExactRational(126));
  CHECK(h.coefficient(1) == 0);
  CHECK(h.coefficient(2) == 0);
  CHECK(!h.is_cuspidal());
  JacobiForm back = jacobi_from_plus(h);
  CHECK(back.weight() == 4);
  CHECK(back.theta_component(0) == e41.theta_component(0));
  CHECK(back.theta_component(1) == e41.theta_component(1));
  PlusSpaceForm scaled = frac_q(3, 2) * h;
  CHECK(scaled.coefficient(4) == ExactRational(189));
  CHECK_THROWS_AS(PlusSpaceForm(3, {ExactRational(0), ExactRational(1)}),
                  std::invalid_argument);
  CHECK_THROWS_AS(PlusSpaceForm(0, {ExactRational(1)}), std::invalid_argument);
  CHECK_THROWS_AS(plus_hecke_square(h, 4), std::invalid_argument);
  CHECK_THROWS_AS(JacobiForm(4, {ExactRational(0), ExactRational(1)},
                             {ExactRational(0), ExactRational(0)}),
                  std::invalid_argument);
}

TEST_CASE("plus-space Hecke action reproduces integral-weight eigenvalues") {
  set_working_bits(256);
  // weight 19/2 against the weight-eighteen eigenform
  PlusSpaceForm h9 = plus_form_from_jacobi(jacobi_cusp_space(10, 200)[0]);
  REQUIRE(h9.kappa() == 9);
  Eigenform f18 = cusp_eigenforms(18, 50)[0];
  CHECK(f18.a_exact(2).rational_value() == ExactRational(-528));
  for (long p : {2l, 3l, 5l}) {
    ExactRational ap = f18.a_exact(p).rational_value();
    auto image = plus_hecke_square(h9, p);
    long nmax = static_cast<long>(image.size()) - 1;
    REQUIRE(nmax >= 8);
    for (long n = 0; n <= nmax; ++n)
      CHECK(image[static_cast<std::size_t>(n)] == ap * h9.coefficient(n));
  }
  // weight 23/2 against the weight-twentytwo eigenform
  PlusSpaceForm h11 = plus_form_from_jacobi(jacobi_cusp_space(12, 100)[0]);
  REQUIRE(h11.kappa() == 11);
  Eigenform f22 = cusp_eigenforms(22, 25)[0];
  CHECK(f22.a_exact(2).rational_value() == ExactRational(-288));
  for (long p : {2l, 3l}) {
    ExactRational ap = f22.a_exact(p).rational_value();
    auto image = plus_hecke_square(h11, p);
    long nmax = static_cast<long>(image.size()) - 1;
    REQUIRE(nmax >= 8);
    for (long n = 0; n <= nmax; ++n)
      CHECK(image[static_cast<std::size_t>(n)] == ap * h11.coefficient(n));
  }
}

TEST_CASE("elliptic raising algebra: exact restrictions") {
  set_working_bits(256);
  JacobiForm gen = jacobi_cusp_space(10, 48)[0];
  JacobiForm gen12 = jacobi_cusp_space(12, 48)[0];
  JacobiForm e41 = jacobi_eisenstein(4, 48);
  for (const JacobiForm* Fp : {&gen, &e41, &gen12}) {
    const JacobiForm& F = *Fp;
    long nmax = F.truncation() / 4;
    // depth zero is the plain restriction to the origin
    NearlyHolomorphicForm r0 = delta_power_restrict(F, 0);
    CHECK(r0.weight() == ExactRational(F.weight()));
    CHECK(r0.depth() == 0);
    auto p0 = r0.integer_part(0);
    for (long n = 0; n <= nmax; ++n) {
      ExactRational sum(0);
      for (long r = 0; r * r <= 4 * n; ++r) {
        sum += F.coefficient(n, r);
        if (r > 0) sum += F.coefficient(n, -r);
      }
      CHECK(p0[static_cast<std::size_t>(n)] == sum);
    }
    // odd powers cancel identically
    CHECK(delta_power_restrict(F, 1).is_zero());
    CHECK(delta_power_restrict(F, 1).weight() ==
          ExactRational(F.weight() + 1));
    CHECK(delta_power_restrict(F, 3).is_zero());
    // the quadratic power: both depth components in closed form.  The
    // inverse-height part is a multiple of the plain restriction, so it can
    // collapse: for the weight-ten generator the restriction lies in a
    // zero-dimensional cusp space and the result is purely holomorphic.
    std::vector<ExactRational> s0(static_cast<std::size_t>(nmax) + 1,
                                  ExactRational(0));
    std::vector<ExactRational> s1(static_cast<std::size_t>(nmax) + 1,
                                  ExactRational(0));
    bool any_s1 = false;
    for (long n = 0; n <= nmax; ++n) {
      for (long r = 0; r * r <= 4 * n; ++r) {
        long mult = (r == 0) ? 1 : 2;
        ExactRational c = F.coefficient(n, r);
        s0[static_cast<std::size_t>(n)] +=
            ExactRational(16 * mult * r * r) * c;
        s1[static_cast<std::size_t>(n)] += ExactRational(-32 * mult) * c;
      }
      if (s1[static_cast<std::size_t>(n)] != 0) any_s1 = true;
    }
    NearlyHolomorphicForm r2 = delta_power_restrict(F, 2);
    CHECK(r2.weight() == ExactRational(F.weight() + 2));
    CHECK(r2.depth() == (any_s1 ? 1 : 0));
    auto g0 = r2.integer_part(0);
    for (long n = 0; n <= nmax; ++n)
      CHECK(g0[static_cast<std::size_t>(n)] == s0[static_cast<std::size_t>(n)]);
    if (r2.depth() >= 1) {
      auto g1 = r2.integer_part(1);
      for (long n = 0; n <= nmax; ++n)
        CHECK(g1[static_cast<std::size_t>(n)] ==
              s1[static_cast<std::size_t>(n)]);
    }
  }
  // the operator splits into its two summands
  OperatorExpansion e(gen);
  CHECK(e == OperatorExpansion(jacobi_cusp_space(10, 48)[0]));
  CHECK(e.cross_multiply().restrict_elliptic().is_zero());
  OperatorExpansion e2 = e.apply();
  CHECK(!(e2 == e));
  NearlyHolomorphicForm ra = e2.apply().restrict_elliptic();
  NearlyHolomorphicForm rs = e2.scaled_z_derivative().restrict_elliptic();
  NearlyHolomorphicForm rc = e2.cross_multiply().restrict_elliptic();
  CHECK(((rs + rc) - ra).is_zero());
  CHECK_THROWS_AS(delta_power_restrict(gen, -1), std::invalid_argument);
}

TEST_CASE("elliptic raising operator matches finite differences") {
  set_working_bits(256);
  JacobiForm gen = jacobi_cusp_space(10, 48)[0];
  Real h(1e-6);
  for (const BigComplex& tau : {BigComplex(Real(0.23), Real(1.19)),
                                BigComplex(Real(-0.41), Real(0.93))}) {
    // depth zero: the restriction is the value at the origin
    BigComplex direct = evaluate_jacobi(gen, tau, BigComplex(0l));
    BigComplex via = evaluate_nearly(delta_power_restrict(gen, 0), tau);
    CHECK(abs_err_d(via, direct) <= 1e-25);
    for (long power : {1l, 2l, 3l}) {
      BigComplex fd = numeric_delta_power(gen, tau, power, h);
      BigComplex alg = evaluate_nearly(delta_power_restrict(gen, power), tau);
      double scale = std::max(1.0, abs(alg).to_double());
      CHECK(abs_err_d(fd, alg) <= 1e-8 * scale);
    }
  }
  CHECK_THROWS_AS(
      evaluate_nearly(delta_power_restrict(gen, 2),
                      BigComplex(Real(0l), Real(-1l))),
      std::domain_error);
}

TEST_CASE("weight-raising ladder: exact coefficients and the tau-derivative") {
  set_working_bits(256);
  QExpansion d = QExpansion::delta(40);
  NearlyHolomorphicForm f0 = NearlyHolomorphicForm::holomorphic(d);
  CHECK(f0.weight() == ExactRational(12));
  CHECK(f0.depth() == 0);
  NearlyHolomorphicForm f1 = maass_shimura_apply(f0, 1);
  CHECK(f1.weight() == ExactRational(14));
  CHECK(f1.depth() == 1);
  auto top = f1.integer_part(0);
  auto low = f1.integer_part(1);
  for (long n = 0; n <= 40; ++n) {
    CHECK(top[static_cast<std::size_t>(n)] ==
          ExactRational(n) * d.coefficient(n));
    CHECK(low[static_cast<std::size_t>(n)] ==
          ExactRational(-12) * d.coefficient(n));
  }
  CHECK((maass_shimura_apply(f0, 0) - f0).is_zero());
  CHECK(maass_shimura_apply(f0, 3).weight() == ExactRational(18));
  // two single steps equal one double step
  CHECK((maass_shimura_apply(f1, 1) - maass_shimura_apply(f0, 2)).is_zero());
  // numeric check of one step at a point, for depth zero and depth one
  BigComplex tau(Real(0.31), Real(1.27));
  const BigComplex two_pi_i(Real(0l), Real(2l) * const_pi());
  for (const NearlyHolomorphicForm* f : {&f0, &f1}) {
    auto g = [&](const BigComplex& t) { return evaluate_nearly(*f, t); };
    BigComplex dtau = wirtinger_d(g, tau, Real(1e-6));
    Real w(f->weight());
    BigComplex ladder =
        (dtau + BigComplex(w) * g(tau) / (tau - conj(tau))) / two_pi_i;
    BigComplex expect = evaluate_nearly(maass_shimura_apply(*f, 1), tau);
    CHECK(rel_err_d(ladder, expect) <= 1e-10);
  }
}

TEST_CASE("raising-ladder inversion recovers the lifted inputs") {
  set_working_bits(256);
  QExpansion d = QExpansion::delta(30);
  NearlyHolomorphicForm hd = NearlyHolomorphicForm::holomorphic(d);
  const auto dq = hd.parts()[0];
  {
    auto us = raising_decomposition(hd);
    REQUIRE(us.size() == 1);
    CHECK(us[0] == dq);
  }
  for (long a : {1l, 2l, 3l}) {
    auto us = raising_decomposition(maass_shimura_apply(hd, a));
    REQUIRE(us.size() == static_cast<std::size_t>(a) + 1);
    CHECK(us[static_cast<std::size_t>(a)] == dq);
    for (long p = 0; p < a; ++p) {
      bool zero = true;
      for (const auto& x : us[static_cast<std::size_t>(p)])
        if (x != 0) zero = false;
      CHECK(zero);
    }
  }
  // a holomorphic remainder alongside a lifted component
  QExpansion e14 = QExpansion::eisenstein(14, 30);
  NearlyHolomorphicForm he14 = NearlyHolomorphicForm::holomorphic(e14);
  NearlyHolomorphicForm mixed = maass_shimura_apply(hd, 1) + he14;
  auto us = raising_decomposition(mixed);
  REQUIRE(us.size() == 2);
  CHECK(us[1] == dq);
  CHECK(us[0] == he14.parts()[0]);
  // weights where a ladder constant vanishes are rejected
  std::vector<std::vector<ExactRational>> parts = {{ExactRational(0)},
                                                   {ExactRational(1)}};
  NearlyHolomorphicForm bad(ExactRational(2), parts);
  CHECK_THROWS_AS(raising_decomposition(bad), std::invalid_argument);
}

TEST_CASE("ladder inversion pins the quadratic-restriction components") {
  set_working_bits(256);
  QExpansion d = QExpansion::delta(12);
  // weight ten: the plain restriction lands in a zero-dimensional cusp
  // space, so the quadratic restriction is already holomorphic and equals
  // thirty-two times the discriminant form on the integer grid
  JacobiForm gen10 = jacobi_cusp_space(10, 48)[0];
  CHECK(delta_power_restrict(gen10, 0).is_zero());
  NearlyHolomorphicForm f12 = delta_power_restrict(gen10, 2);
  REQUIRE(f12.weight() == ExactRational(12));
  REQUIRE(f12.depth() == 0);
  auto us10 = raising_decomposition(f12);
  REQUIRE(us10.size() == 1);
  for (std::size_t j = 0; j < us10[0].size(); ++j) {
    if (j % 4 == 0)
      CHECK(us10[0][j] ==
            ExactRational(32) * d.coefficient(static_cast<long>(j) / 4));
    else
      CHECK(us10[0][j] == 0);
  }
  // weight twelve: the plain restriction is twelve times the discriminant
  // form, the quadratic restriction has depth one, its lifted component is
  // again the thirty-two-fold discriminant form, and the holomorphic
  // remainder dies in the zero-dimensional weight-fourteen cusp space
  JacobiForm gen12 = jacobi_cusp_space(12, 48)[0];
  auto p0 = delta_power_restrict(gen12, 0).integer_part(0);
  for (std::size_t n = 0; n < p0.size(); ++n)
    CHECK(p0[n] == ExactRational(12) * d.coefficient(static_cast<long>(n)));
  NearlyHolomorphicForm f14 = delta_power_restrict(gen12, 2);
  REQUIRE(f14.weight() == ExactRational(14));
  REQUIRE(f14.depth() == 1);
  auto us12 = raising_decomposition(f14);
  REQUIRE(us12.size() == 2);
  for (std::size_t j = 0; j < us12[1].size(); ++j) {
    if (j % 4 == 0)
      CHECK(us12[1][j] ==
            ExactRational(32) * d.coefficient(static_cast<long>(j) / 4));
    else
      CHECK(us12[1][j] == 0);
  }
  for (const auto& x : us12[0]) CHECK(x == 0);
}

TEST_CASE("half-integral evaluation: component transport vs direct series") {
  set_working_bits(256);
  PlusSpaceForm h = plus_form_from_jacobi(jacobi_cusp_space(10, 120)[0]);
  PlusSeries direct(h);
  // translation-only reduction
  BigComplex w1(Real(0.3), Real(2l));
  CHECK(rel_err_d(evaluate_plus(h, w1), direct(w1)) <= 1e-12);
  // walks through the inversion
  BigComplex w2(Real(0.1), Real(0.15));
  CHECK(rel_err_d(evaluate_plus(h, w2), direct(w2)) <= 1e-12);
  BigComplex w4(Real(0.26), Real(0.09));
  CHECK(rel_err_d(evaluate_plus(h, w4), direct(w4)) <= 1e-12);
  // a negative-real-part point
  BigComplex w3(Real(-0.27), Real(0.4));
  CHECK(rel_err_d(evaluate_plus(h, w3), direct(w3)) <= 1e-12);
  CHECK_THROWS_AS(evaluate_plus(h, BigComplex(Real(0.1), Real(-1l))),
                  std::domain_error);
}

TEST_CASE("modular pairing agrees with Petersson norms") {
  set_working_bits(256);
  for (long k : {12l, 16l, 18l}) {
    Eigenform g = cusp_eigenforms(k, 60)[0];
    NearlyHolomorphicForm wrap =
        NearlyHolomorphicForm::holomorphic(eigen_expansion(g));
    BigComplex p = pairing_sl2z(g, wrap, Real(1e-24));
    Real pn = petersson_norm(g, Real(1e-18));
    CHECK(abs_err_d(p, BigComplex(pn)) <= 1e-9 * pn.to_double());
    // conjugate-linear in the second argument
    BigComplex p2 = pairing_sl2z(g, ExactRational(-2) * wrap, Real(1e-24));
    CHECK(abs_err_d(p2, BigComplex(-2l) * p) <= 1e-18);
  }
  // a non-cuspidal wrap of matching weight pairs to zero
  Eigenform f16 = cusp_eigenforms(16, 60)[0];
  NearlyHolomorphicForm e16 =
      NearlyHolomorphicForm::holomorphic(QExpansion::eisenstein(16, 60));
  CHECK(abs(pairing_sl2z(f16, e16, Real(1e-24))).to_double() <= 1e-15);
  // guards: weight mismatch, excessive depth, short truncation
  Eigenform g12 = cusp_eigenforms(12, 60)[0];
  CHECK_THROWS_AS(pairing_sl2z(g12, e16, Real(1e-24)), std::invalid_argument);
  std::vector<std::vector<ExactRational>> deep(12, {ExactRational(1)});
  CHECK_THROWS_AS(
      pairing_sl2z(g12, NearlyHolomorphicForm(ExactRational(12), deep),
                   Real(1e-24)),
      std::invalid_argument);
  CHECK_THROWS_AS(
      pairing_sl2z(g12,
                   NearlyHolomorphicForm::holomorphic(QExpansion::delta(7)),
                   Real(1e-24)),
      std::invalid_argument);
}

TEST_CASE("pairing: quadratic restriction and raised-input orthogonality") {
  set_working_bits(256);
  // the quadratic restriction of the weight-ten generator pairs with the
  // discriminant eigenform as thirty-two times its norm
  JacobiForm gen = jacobi_cusp_space(10, 240)[0];
  NearlyHolomorphicForm f12 = delta_power_restrict(gen, 2);
  Eigenform g12 = cusp_eigenforms(12, 60)[0];
  BigComplex p = pairing_sl2z(g12, f12, Real(1e-24));
  Real pn = petersson_norm(g12, Real(1e-18));
  CHECK(abs_err_d(p, BigComplex(Real(32l) * pn)) <= 1e-8 * pn.to_double());
  // a raised input pairs to zero against any cusp form, which pins the
  // relative weighting of the depth components inside the kernel
  NearlyHolomorphicForm raised = maass_shimura_apply(
      NearlyHolomorphicForm::holomorphic(QExpansion::eisenstein(14, 60)), 1);
  Eigenform f16 = cusp_eigenforms(16, 60)[0];
  CHECK(abs(pairing_sl2z(f16, raised, Real(1e-24))).to_double() <= 1e-12);
  // adding a raised piece therefore does not move a holomorphic pairing
  NearlyHolomorphicForm mix =
      NearlyHolomorphicForm::holomorphic(eigen_expansion(g12)) +
      maass_shimura_apply(
          NearlyHolomorphicForm::holomorphic(QExpansion::eisenstein(10, 60)),
          1);
  BigComplex pm = pairing_sl2z(g12, mix, Real(1e-24));
  CHECK(abs_err_d(pm, BigComplex(pn)) <= 1e-12);
}

TEST_CASE("level-four norms: positivity, scaling, truncation, invariance") {
  set_working_bits(128);
  Real eps_norm(1e-8);
  PlusSpaceForm h = plus_form_from_jacobi(jacobi_cusp_space(10, 60)[0]);
  BigComplex n1 = petersson_gamma04(h, h, eps_norm);
  CHECK(n1.re.to_double() > 0.0);
  CHECK(n1.im.is_zero());
  // rescaling the form scales the norm by the squared factor
  PlusSpaceForm h3 = ExactRational(-3) * h;
  BigComplex n3 = petersson_gamma04(h3, h3, eps_norm);
  CHECK(abs_err_d(n3.re, Real(9l) * n1.re) <= 5e-7 * n1.re.to_double());
  // a longer truncation does not move the value
  PlusSpaceForm hl = plus_form_from_jacobi(jacobi_cusp_space(10, 100)[0]);
  BigComplex nl = petersson_gamma04(hl, hl, eps_norm);
  CHECK(abs_err_d(nl.re, n1.re) <= 5e-7 * n1.re.to_double());
  // the squared pairing over the norm ignores rescaling of the input
  JacobiForm gen100 = jacobi_cusp_space(10, 100)[0];
  Eigenform g12 = cusp_eigenforms(12, 25)[0];
  BigComplex p1 =
      pairing_sl2z(g12, delta_power_restrict(gen100, 2), Real(1e-24));
  BigComplex p3 = pairing_sl2z(
      g12, delta_power_restrict(ExactRational(-3) * gen100, 2), Real(1e-24));
  CHECK(abs_err_d(p3, BigComplex(-3l) * p1) <= 1e-15);
  Real ratio1 = norm_sq(p1) / n1.re;
  Real ratio3 = norm_sq(p3) / n3.re;
  CHECK(rel_err_d(ratio3, ratio1) <= 2e-6);
  // weight guard
  CHECK_THROWS_AS(
      petersson_gamma04(h, plus_form_from_jacobi(jacobi_cusp_space(12, 60)[0]),
                        eps_norm),
      std::invalid_argument);
}

TEST_CASE("level-four norms match a direct fundamental-domain integral") {
  set_working_bits(128);
  Real eps_norm(1e-8), eps_oracle(1e-8);
  const Real two_pi = Real(2l) * const_pi();
  // weight 19/2
  PlusSpaceForm h9 = plus_form_from_jacobi(jacobi_cusp_space(10, 60)[0]);
  PlusSpaceForm h9l = plus_form_from_jacobi(jacobi_cusp_space(10, 240)[0]);
  Real n9 = petersson_gamma04(h9, h9, eps_norm).re;
  Real c9 = ford_domain_integral(h9l, eps_oracle) / (two_pi * n9);
  MESSAGE("fundamental-domain ratio, weight 19/2: " << c9.to_string(20));
  CHECK(abs_err_d(c9, Real(1l)) <= 1e-4);
  // weight 23/2
  PlusSpaceForm h11 = plus_form_from_jacobi(jacobi_cusp_space(12, 60)[0]);
  PlusSpaceForm h11l = plus_form_from_jacobi(jacobi_cusp_space(12, 240)[0]);
  Real n11 = petersson_gamma04(h11, h11, eps_norm).re;
  Real c11 = ford_domain_integral(h11l, eps_oracle) / (two_pi * n11);
  MESSAGE("fundamental-domain ratio, weight 23/2: " << c11.to_string(20));
  CHECK(abs_err_d(c11, Real(1l)) <= 1e-4);
  CHECK(abs_err_d(c9, c11) <= 2e-5);
}
