#include "symsix/modforms.hpp"

#include "symsix/quadrature.hpp"

#include "json.hpp"

#include <algorithm>
#include <fstream>
#include <optional>
#include <stdexcept>
#include <utility>

namespace symsix {

// ---------------------------------------------------------------------------
// NumberFieldElement
// ---------------------------------------------------------------------------

NumberFieldElement NumberFieldElement::quadratic(
    const std::vector<ExactInteger>& minpoly, const ExactRational& a,
    const ExactRational& b) {
  if (minpoly.size() != 3 || minpoly[2] != 1)
    throw std::invalid_argument(
        "NumberFieldElement: minimal polynomial must be monic quadratic "
        "{c0, c1, 1}");
  ExactInteger disc = minpoly[1] * minpoly[1] - 4 * minpoly[0];
  if (disc <= 0)
    throw std::invalid_argument(
        "NumberFieldElement: only totally real quadratic fields are "
        "supported");
  if (mpz_perfect_square_p(disc.get_mpz_t()))
    throw std::invalid_argument(
        "NumberFieldElement: polynomial is reducible over the rationals");
  NumberFieldElement x;
  x.coords_ = {a, b};
  x.c0_ = minpoly[0];
  x.c1_ = minpoly[1];
  return x;
}

bool NumberFieldElement::is_rational() const {
  return coords_.size() == 1 || coords_[1] == 0;
}

ExactRational NumberFieldElement::rational_value() const {
  if (!is_rational())
    throw std::domain_error("NumberFieldElement: not a rational value");
  return coords_[0];
}

std::vector<ExactInteger> NumberFieldElement::minimal_polynomial() const {
  if (coords_.size() == 1) return {ExactInteger(0), ExactInteger(1)};
  return {c0_, c1_, ExactInteger(1)};
}

NumberFieldElement NumberFieldElement::galois_conjugate() const {
  if (coords_.size() == 1) return *this;
  NumberFieldElement x = *this;
  x.coords_[0] = coords_[0] - coords_[1] * ExactRational(c1_);
  x.coords_[1] = -coords_[1];
  return x;
}

ExactRational NumberFieldElement::field_trace() const {
  if (coords_.size() == 1) return coords_[0];
  return 2 * coords_[0] - coords_[1] * ExactRational(c1_);
}

ExactRational NumberFieldElement::field_norm() const {
  if (coords_.size() == 1) return coords_[0];
  const ExactRational &a = coords_[0], &b = coords_[1];
  return a * a - a * b * ExactRational(c1_) + b * b * ExactRational(c0_);
}

Real NumberFieldElement::embed(int embedding) const {
  if (embedding != 0 && embedding != 1)
    throw std::invalid_argument("NumberFieldElement: embedding index");
  if (coords_.size() == 1) return Real(coords_[0]);
  ExactInteger disc = c1_ * c1_ - 4 * c0_;
  Real s = sqrt(Real(disc));
  Real alpha = (Real(ExactInteger(-c1_)) + (embedding == 1 ? s : -s)) / Real(2l);
  return Real(coords_[0]) + Real(coords_[1]) * alpha;
}

void NumberFieldElement::promote(NumberFieldElement& x,
                                 const NumberFieldElement& like) {
  if (like.coords_.size() == 1) return;
  if (x.coords_.size() == 1) {
    x.coords_.push_back(ExactRational(0));
    x.c0_ = like.c0_;
    x.c1_ = like.c1_;
    return;
  }
  if (x.c0_ != like.c0_ || x.c1_ != like.c1_)
    throw std::invalid_argument(
        "NumberFieldElement: mixing distinct quadratic fields");
}

NumberFieldElement& NumberFieldElement::operator+=(
    const NumberFieldElement& o) {
  promote(*this, o);
  NumberFieldElement rhs = o;
  promote(rhs, *this);
  for (std::size_t i = 0; i < coords_.size(); ++i) coords_[i] += rhs.coords_[i];
  return *this;
}

NumberFieldElement& NumberFieldElement::operator-=(
    const NumberFieldElement& o) {
  promote(*this, o);
  NumberFieldElement rhs = o;
  promote(rhs, *this);
  for (std::size_t i = 0; i < coords_.size(); ++i) coords_[i] -= rhs.coords_[i];
  return *this;
}

NumberFieldElement& NumberFieldElement::operator*=(
    const NumberFieldElement& o) {
  promote(*this, o);
  NumberFieldElement rhs = o;
  promote(rhs, *this);
  if (coords_.size() == 1) {
    coords_[0] *= rhs.coords_[0];
    return *this;
  }
  const ExactRational a1 = coords_[0], b1 = coords_[1];
  const ExactRational &a2 = rhs.coords_[0], &b2 = rhs.coords_[1];
  ExactRational cross = b1 * b2;
  coords_[0] = a1 * a2 - cross * ExactRational(c0_);
  coords_[1] = a1 * b2 + a2 * b1 - cross * ExactRational(c1_);
  return *this;
}

NumberFieldElement& NumberFieldElement::operator/=(
    const NumberFieldElement& o) {
  promote(*this, o);
  NumberFieldElement rhs = o;
  promote(rhs, *this);
  if (rhs.coords_.size() == 1) {
    if (rhs.coords_[0] == 0)
      throw std::domain_error("NumberFieldElement: division by zero");
    for (auto& c : coords_) c /= rhs.coords_[0];
    return *this;
  }
  const ExactRational &a = rhs.coords_[0], &b = rhs.coords_[1];
  ExactRational nrm =
      a * a - a * b * ExactRational(c1_) + b * b * ExactRational(c0_);
  if (nrm == 0)
    throw std::domain_error("NumberFieldElement: division by zero");
  NumberFieldElement inv = rhs;
  inv.coords_[0] = (a - b * ExactRational(c1_)) / nrm;
  inv.coords_[1] = -b / nrm;
  return *this *= inv;
}

bool operator==(const NumberFieldElement& a, const NumberFieldElement& b) {
  NumberFieldElement x = a, y = b;
  NumberFieldElement::promote(x, y);
  NumberFieldElement::promote(y, x);
  return x.coords_ == y.coords_;
}

// ---------------------------------------------------------------------------
// QExpansion
// ---------------------------------------------------------------------------

QExpansion::QExpansion(long weight, std::vector<ExactRational> coeffs)
    : weight_(weight), coeffs_(std::move(coeffs)) {
  if (weight_ < 0) throw std::invalid_argument("QExpansion: negative weight");
  if (coeffs_.empty())
    throw std::invalid_argument("QExpansion: empty coefficient list");
}

const ExactRational& QExpansion::coefficient(long n) const {
  if (n < 0 || n > truncation())
    throw std::out_of_range("QExpansion: coefficient beyond truncation");
  return coeffs_[static_cast<std::size_t>(n)];
}

QExpansion QExpansion::eisenstein(long k, long N) {
  if (k < 4 || k % 2)
    throw std::invalid_argument("eisenstein: weight must be even, at least 4");
  if (N < 0) throw std::invalid_argument("eisenstein: negative truncation");
  std::vector<ExactRational> c(static_cast<std::size_t>(N) + 1,
                               ExactRational(0));
  c[0] = 1;
  ExactRational factor = ExactRational(-2 * k) / bernoulli_q(k);
  std::vector<ExactInteger> sig(static_cast<std::size_t>(N) + 1,
                                ExactInteger(0));
  for (long d = 1; d <= N; ++d) {
    ExactInteger dp;
    mpz_ui_pow_ui(dp.get_mpz_t(), static_cast<unsigned long>(d),
                  static_cast<unsigned long>(k - 1));
    for (long m = d; m <= N; m += d) sig[m] += dp;
  }
  for (long n = 1; n <= N; ++n) c[n] = factor * ExactRational(sig[n]);
  return QExpansion(k, std::move(c));
}

QExpansion QExpansion::delta(long N) {
  if (N < 1) throw std::invalid_argument("delta: truncation below 1");
  // cube of the infinite product as the sparse signed odd-square series,
  // then three squarings give the 24th power; the leading q shifts by one
  const long L = N;  // degrees 0 .. L-1
  std::vector<ExactInteger> P(static_cast<std::size_t>(L), ExactInteger(0));
  for (long j = 0;; ++j) {
    long e = j * (j + 1) / 2;
    if (e >= L) break;
    P[e] += ExactInteger((j % 2) ? -(2 * j + 1) : (2 * j + 1));
  }
  auto square = [L](const std::vector<ExactInteger>& v) {
    std::vector<ExactInteger> r(static_cast<std::size_t>(L), ExactInteger(0));
    for (long i = 0; i < L; ++i) {
      if (v[i] == 0) continue;
      for (long j = 0; i + j < L; ++j) {
        if (v[j] == 0) continue;
        r[i + j] += v[i] * v[j];
      }
    }
    return r;
  };
  std::vector<ExactInteger> P8 = square(square(square(P)));
  std::vector<ExactRational> c(static_cast<std::size_t>(N) + 1,
                               ExactRational(0));
  for (long n = 1; n <= N; ++n) c[n] = ExactRational(P8[n - 1]);
  return QExpansion(12, std::move(c));
}

QExpansion operator+(const QExpansion& a, const QExpansion& b) {
  if (a.weight_ != b.weight_)
    throw std::invalid_argument("QExpansion: adding different weights");
  long N = std::min(a.truncation(), b.truncation());
  std::vector<ExactRational> c(static_cast<std::size_t>(N) + 1);
  for (long n = 0; n <= N; ++n) c[n] = a.coeffs_[n] + b.coeffs_[n];
  return QExpansion(a.weight_, std::move(c));
}

QExpansion operator-(const QExpansion& a, const QExpansion& b) {
  if (a.weight_ != b.weight_)
    throw std::invalid_argument("QExpansion: subtracting different weights");
  long N = std::min(a.truncation(), b.truncation());
  std::vector<ExactRational> c(static_cast<std::size_t>(N) + 1);
  for (long n = 0; n <= N; ++n) c[n] = a.coeffs_[n] - b.coeffs_[n];
  return QExpansion(a.weight_, std::move(c));
}

QExpansion operator*(const QExpansion& a, const QExpansion& b) {
  long N = std::min(a.truncation(), b.truncation());
  std::vector<ExactRational> c(static_cast<std::size_t>(N) + 1,
                               ExactRational(0));
  for (long i = 0; i <= N; ++i) {
    if (a.coeffs_[i] == 0) continue;
    for (long j = 0; i + j <= N; ++j) {
      if (b.coeffs_[j] == 0) continue;
      c[i + j] += a.coeffs_[i] * b.coeffs_[j];
    }
  }
  return QExpansion(a.weight_ + b.weight_, std::move(c));
}

QExpansion operator*(const ExactRational& c, const QExpansion& a) {
  std::vector<ExactRational> r(a.coeffs_);
  for (auto& x : r) x *= c;
  return QExpansion(a.weight_, std::move(r));
}

QExpansion QExpansion::pow(long e) const {
  if (e < 0) throw std::invalid_argument("QExpansion: negative power");
  std::vector<ExactRational> one(coeffs_.size(), ExactRational(0));
  one[0] = 1;
  QExpansion acc(0, std::move(one));
  QExpansion base = *this;
  while (e) {
    if (e & 1) acc = acc * base;
    base = base * base;
    e >>= 1;
  }
  return acc;
}

bool operator==(const QExpansion& a, const QExpansion& b) {
  return a.weight_ == b.weight_ && a.coeffs_ == b.coeffs_;
}

// ---------------------------------------------------------------------------
// Echelon basis and eigenforms
// ---------------------------------------------------------------------------

long modular_dim(long weight) {
  if (weight < 0 || weight % 2) return 0;
  if (weight % 12 == 2) return weight / 12;
  return weight / 12 + 1;
}

std::vector<QExpansion> victor_miller_basis(long weight, long N) {
  if (weight < 0 || weight % 2)
    throw std::invalid_argument(
        "victor_miller_basis: weight must be a nonnegative even integer");
  long d = modular_dim(weight);
  if (d == 0) return {};
  if (N < d)
    throw std::invalid_argument(
        "victor_miller_basis: truncation below dimension");
  if (weight == 0) {
    std::vector<ExactRational> one(static_cast<std::size_t>(N) + 1,
                                   ExactRational(0));
    one[0] = 1;
    return {QExpansion(0, std::move(one))};
  }

  QExpansion e4 = QExpansion::eisenstein(4, N);
  QExpansion e6 = QExpansion::eisenstein(6, N);
  std::optional<QExpansion> dl;
  if (d >= 2) dl = QExpansion::delta(N);
  std::vector<std::vector<ExactRational>> rows;
  rows.reserve(d);
  for (long j = 0; j < d; ++j) {
    long m = weight - 12 * j;
    long del = (m % 4 == 0) ? 0 : 1;
    long a = (m - 6 * del) / 4;
    if (a < 0 || 4 * a + 6 * del != m)
      throw std::logic_error("victor_miller_basis: weight decomposition");
    QExpansion f = e4.pow(a) * e6.pow(del);
    if (j > 0) f = f * dl->pow(j);
    std::vector<ExactRational> row(static_cast<std::size_t>(N) + 1);
    for (long n = 0; n <= N; ++n) row[n] = f.coefficient(n);
    rows.push_back(std::move(row));
  }

  // full reduction: element i gets coefficient delta_{ij} at q^j for j < d
  for (long i = 0; i < d; ++i) {
    if (rows[i][i] == 0)
      throw std::logic_error("victor_miller_basis: pivot vanished");
    if (rows[i][i] != 1) {
      ExactRational piv = rows[i][i];
      for (auto& c : rows[i]) c /= piv;
    }
    for (long r = 0; r < d; ++r) {
      if (r == i || rows[r][i] == 0) continue;
      ExactRational f = rows[r][i];
      for (long n = 0; n <= N; ++n) rows[r][n] -= f * rows[i][n];
    }
  }

  std::vector<QExpansion> basis;
  basis.reserve(d);
  for (auto& row : rows) basis.emplace_back(weight, std::move(row));
  return basis;
}

Eigenform::Eigenform(long weight, std::vector<NumberFieldElement> coeffs,
                     int embedding)
    : weight_(weight), coeffs_(std::move(coeffs)), embedding_(embedding) {
  if (weight_ < 4 || weight_ % 2)
    throw std::invalid_argument("Eigenform: weight must be even, at least 4");
  if (coeffs_.size() < 3)
    throw std::invalid_argument("Eigenform: need coefficients through q^2");
  if (embedding_ != 0 && embedding_ != 1)
    throw std::invalid_argument("Eigenform: embedding index");
  if (!(coeffs_[0] == NumberFieldElement(0)))
    throw std::invalid_argument("Eigenform: not cuspidal");
  if (!(coeffs_[1] == NumberFieldElement(1)))
    throw std::invalid_argument("Eigenform: not normalized");
  std::vector<ExactInteger> mp;
  for (const auto& c : coeffs_) {
    if (c.degree() != 2) continue;
    auto m = c.minimal_polynomial();
    if (mp.empty())
      mp = m;
    else if (mp != m)
      throw std::invalid_argument("Eigenform: mixed coefficient fields");
  }
  if (embedding_ == 1 && mp.empty())
    throw std::invalid_argument(
        "Eigenform: second embedding needs a quadratic coefficient field");
}

long Eigenform::coefficient_field_degree() const {
  for (const auto& c : coeffs_)
    if (c.degree() == 2) return 2;
  return 1;
}

const NumberFieldElement& Eigenform::a_exact(long n) const {
  if (n < 0 || n > truncation())
    throw std::out_of_range("Eigenform: coefficient beyond truncation");
  return coeffs_[static_cast<std::size_t>(n)];
}

Real Eigenform::a(long n) const { return a_exact(n).embed(embedding_); }

std::vector<Eigenform> cusp_eigenforms(long weight, long N) {
  if (weight < 0 || weight % 2)
    throw std::invalid_argument(
        "cusp_eigenforms: weight must be a nonnegative even integer");
  long d = modular_dim(weight);
  long dc = d - 1;
  if (dc <= 0) return {};
  if (dc > 2)
    throw std::runtime_error(
        "cusp_eigenforms: coefficient field degree above 2 not supported");
  if (N < 2)
    throw std::invalid_argument("cusp_eigenforms: truncation below 2");

  const long M = std::max(2 * N, 2 * d + 2);
  auto vm = victor_miller_basis(weight, M);
  ExactRational p_pow = ExactRational(ExactInteger(1) << (weight - 1));

  auto copy_coeffs = [M](const QExpansion& f) {
    std::vector<ExactRational> v(static_cast<std::size_t>(M) + 1);
    for (long n = 0; n <= M; ++n) v[n] = f.coefficient(n);
    return v;
  };
  // coefficient of q^n in the image of the expansion under the first Hecke
  // operator: a(2n) + 2^{weight-1} a(n/2)
  auto t2 = [&](const std::vector<ExactRational>& b, long n) {
    ExactRational r = b[2 * n];
    if (n % 2 == 0) r += p_pow * b[n / 2];
    return r;
  };

  if (dc == 1) {
    auto b = copy_coeffs(vm[1]);
    ExactRational lam = b[2];
    for (long n = 1; n <= N; ++n) {
      if (t2(b, n) != lam * b[n])
        throw std::logic_error("cusp_eigenforms: eigen-identity failed");
    }
    std::vector<NumberFieldElement> coeffs;
    coeffs.reserve(N + 1);
    for (long n = 0; n <= N; ++n) coeffs.emplace_back(b[n]);
    return {Eigenform(weight, std::move(coeffs), 0)};
  }

  auto b1 = copy_coeffs(vm[1]);
  auto b2 = copy_coeffs(vm[2]);
  if (t2(b1, 1) != 0 || t2(b2, 1) != 1)
    throw std::logic_error("cusp_eigenforms: echelon head violated");
  ExactRational m21 = t2(b1, 2), m22 = t2(b2, 2);
  if (m21.get_den() != 1 || m22.get_den() != 1)
    throw std::logic_error(
        "cusp_eigenforms: Hecke matrix not integral on the echelon basis");
  // eigenvector for eigenvalue alpha is (1, alpha); alpha^2 = m22 alpha + m21
  ExactInteger c0 = -m21.get_num(), c1 = -m22.get_num();
  ExactInteger disc = c1 * c1 - 4 * c0;
  if (disc <= 0)
    throw std::logic_error(
        "cusp_eigenforms: eigenvalues not real and distinct");

  if (mpz_perfect_square_p(disc.get_mpz_t())) {
    ExactInteger s;
    mpz_sqrt(s.get_mpz_t(), disc.get_mpz_t());
    std::vector<Eigenform> out;
    for (int sign : {-1, +1}) {
      ExactRational lam = frac_q(m22.get_num() + sign * s, 2);
      std::vector<ExactRational> b(static_cast<std::size_t>(M) + 1);
      for (long n = 0; n <= M; ++n) b[n] = b1[n] + lam * b2[n];
      for (long n = 1; n <= N; ++n)
        if (t2(b, n) != lam * b[n])
          throw std::logic_error("cusp_eigenforms: eigen-identity failed");
      std::vector<NumberFieldElement> coeffs;
      coeffs.reserve(N + 1);
      for (long n = 0; n <= N; ++n) coeffs.emplace_back(b[n]);
      out.emplace_back(weight, std::move(coeffs), 0);
    }
    return out;
  }

  std::vector<ExactInteger> mp = {c0, c1, ExactInteger(1)};
  auto a_of = [&](long n) {
    return NumberFieldElement::quadratic(mp, b1[n], b2[n]);
  };
  NumberFieldElement a2 = a_of(2);
  for (long n = 1; n <= N; ++n) {
    NumberFieldElement lhs = a_of(2 * n);
    if (n % 2 == 0) lhs += NumberFieldElement(p_pow) * a_of(n / 2);
    if (!(lhs == a2 * a_of(n)))
      throw std::logic_error("cusp_eigenforms: eigen-identity failed");
  }
  std::vector<NumberFieldElement> coeffs;
  coeffs.reserve(N + 1);
  for (long n = 0; n <= N; ++n) coeffs.push_back(a_of(n));
  std::vector<Eigenform> out;
  out.emplace_back(weight, coeffs, 0);
  out.emplace_back(weight, std::move(coeffs), 1);
  return out;
}

// ---------------------------------------------------------------------------
// Complex evaluation
// ---------------------------------------------------------------------------

namespace {

// audit |a(n)| <= C n^mu on the known range, then certify the series tail
// below eps at height Im(tau); returns the Horner sum over the truncation
BigComplex evaluate_core(const std::vector<Real>& a, const BigComplex& tau,
                         const Real& eps, const Real& C, const Real& mu) {
  if (!(tau.im > Real(0l)))
    throw std::domain_error("evaluate: point must lie in the upper half plane");
  const long N = static_cast<long>(a.size()) - 1;
  const Real slack = Real(1l) + eps_bits(working_bits() / 2);
  for (long n = 1; n <= N; ++n)
    if (!(abs(a[n]) <= C * symsix::pow(Real(n), mu) * slack))
      throw std::invalid_argument(
          "evaluate: declared growth bound fails on a known coefficient");
  const Real tr = exp(-(Real(2l) * const_pi()) * tau.im);
  const Real rho = symsix::pow(Real(N + 2) / Real(N + 1), mu) * tr;
  if (!(rho < Real(1l)))
    throw std::runtime_error("evaluate: truncation insufficient at this height");
  const Real tail = C * symsix::pow(Real(N + 1), mu) *
                    symsix::pow(tr, N + 1) / (Real(1l) - rho);
  if (!(tail <= eps))
    throw std::runtime_error(
        "evaluate: truncation insufficient for the target accuracy");
  const BigComplex t = exp(BigComplex(Real(0l), Real(2l) * const_pi()) * tau);
  BigComplex s(0l);
  for (long n = N; n >= 0; --n) s = s * t + BigComplex(a[n]);
  return s;
}

std::vector<Real> embedded_coeffs(const Eigenform& form) {
  std::vector<Real> a(static_cast<std::size_t>(form.truncation()) + 1);
  for (long n = 0; n <= form.truncation(); ++n) a[n] = form.a(n);
  return a;
}

}  // namespace

BigComplex evaluate(const Eigenform& form, const BigComplex& tau,
                    const Real& eps) {
  // divisor-count times the square-root bound: |a(n)| <= n^{(k+1)/2}
  return evaluate_core(embedded_coeffs(form), tau, eps, Real(1l),
                       Real(form.weight() + 1) / Real(2l));
}

BigComplex evaluate(const Eigenform& form, const BigComplex& tau) {
  return evaluate(form, tau, eps_bits(working_bits() - 16));
}

BigComplex evaluate_expansion(const QExpansion& f, const BigComplex& tau,
                              const Real& eps, const Real& tail_const,
                              long tail_power) {
  std::vector<Real> a(static_cast<std::size_t>(f.truncation()) + 1);
  for (long n = 0; n <= f.truncation(); ++n) a[n] = Real(f.coefficient(n));
  return evaluate_core(a, tau, eps, tail_const, Real(tail_power));
}

// ---------------------------------------------------------------------------
// Petersson norm
// ---------------------------------------------------------------------------

namespace {

// integral over (Y, infinity) of y^m e^{-c y} dy, exact by parts reduction
Real incomplete_exp_integral(const Real& c, long m, const Real& Y) {
  Real sum(0l), fall(1l);
  for (long j = 0; j <= m; ++j) {
    sum += fall * symsix::pow(Y, m - j) / symsix::pow(c, j + 1);
    fall *= Real(m - j);
  }
  return exp(-c * Y) * sum;
}

Real petersson_core(long k, const std::vector<Real>& a, const Real& eps,
                    const Real& C, const Real& mu) {
  const long N = static_cast<long>(a.size()) - 1;
  if (N < 1) throw std::domain_error("petersson_norm: empty expansion");
  if (!a[0].is_zero())
    throw std::domain_error("petersson_norm: non-cuspidal input diverges");
  if (k < 4) throw std::domain_error("petersson_norm: weight below 4");
  const Real pi = const_pi();
  const long m = k - 2;

  const Real slack = Real(1l) + eps_bits(working_bits() / 2);
  for (long n = 1; n <= N; ++n)
    if (!(abs(a[n]) <= C * symsix::pow(Real(n), mu) * slack))
      throw std::invalid_argument(
          "petersson_norm: declared growth bound fails on a known "
          "coefficient");

  // tail above height 2, term by term; remainder certified from the bound
  Real tail_sum(0l);
  for (long n = 1; n <= N; ++n)
    tail_sum +=
        a[n] * a[n] * incomplete_exp_integral(Real(4l) * pi * Real(n), m,
                                              Real(2l));
  {
    Real fac(1l);
    for (long j = 2; j <= m + 1; ++j) fac *= Real(j);
    Real r1 = C * C * symsix::pow(Real(N + 1), Real(2l) * mu) *
              exp(-(Real(8l) * pi) * Real(N + 1)) * fac *
              symsix::pow(Real(2l), m) / (Real(4l) * pi * Real(N + 1));
    Real ratio =
        symsix::pow(Real(N + 2) / Real(N + 1), Real(2l) * mu) *
        exp(-(Real(8l) * pi));
    if (!(ratio < Real(1l)) || !(r1 / (Real(1l) - ratio) <= eps))
      throw std::runtime_error(
          "petersson_norm: truncation cannot certify the high tail");
  }

  // truncation error inside the compact cell, certified at the lowest height
  const Real sqrt3h = sqrt(Real(3l)) / Real(2l);
  {
    Real t0 = exp(-(Real(2l) * pi) * sqrt3h);
    Real rho0 = symsix::pow(Real(N + 2) / Real(N + 1), mu) * t0;
    if (!(rho0 < Real(1l)))
      throw std::runtime_error(
          "petersson_norm: truncation insufficient in the compact cell");
    Real ftail = C * symsix::pow(Real(N + 1), mu) * symsix::pow(t0, N + 1) /
                 (Real(1l) - rho0);
    Real fbound = ftail;
    Real tp = t0;
    for (long n = 1; n <= N; ++n) {
      fbound += abs(a[n]) * tp;
      tp *= t0;
    }
    Real cell_err =
        (Real(2l) * fbound * ftail + ftail * ftail) *
        symsix::pow(Real(2l), m) * Real(2l);
    if (!(cell_err <= eps))
      throw std::runtime_error(
          "petersson_norm: truncation insufficient in the compact cell");
  }

  // compact cell: the x-average of the squared truncation is a finite
  // cosine polynomial, integrated exactly; only the height remains for the
  // adaptive quadrature.  Below height 1 the domain excludes the unit-disc
  // cap, so the x-interval shrinks to [x0, 1/2] and mirror.
  auto cell_integrand = [&](const Real& y) -> Real {
    Real t = exp(-(Real(2l) * pi) * y);
    std::vector<Real> v(static_cast<std::size_t>(N) + 1, Real(0l));
    Real tp = t;
    for (long n = 1; n <= N; ++n) {
      v[n] = a[n] * tp;
      tp *= t;
    }
    std::vector<Real> c(static_cast<std::size_t>(N), Real(0l));
    for (long j = 0; j < N; ++j) {
      Real s(0l);
      for (long n = 1; n + j <= N; ++n) s += v[n] * v[n + j];
      c[j] = s;
    }
    Real x0(0l);
    if (y < Real(1l)) x0 = sqrt((Real(1l) - y) * (Real(1l) + y));
    Real S = Real(2l) * c[0] * (Real(ExactRational(1, 2)) - x0);
    if (!x0.is_zero()) {
      Real theta = Real(2l) * pi * x0;
      Real s1 = sin(theta), c1 = cos(theta);
      Real sj = s1, cj = c1;
      for (long j = 1; j < N; ++j) {
        S -= Real(2l) * c[j] * sj / (pi * Real(j));
        Real sn = sj * c1 + cj * s1;
        cj = cj * c1 - sj * s1;
        sj = sn;
      }
    }
    return S * symsix::pow(y, m);
  };
  Real cell = tanh_sinh(cell_integrand, sqrt3h, Real(1l), eps) +
              tanh_sinh(cell_integrand, Real(1l), Real(2l), eps);

  return (Real(3l) / pi) * (cell + tail_sum);
}

}  // namespace

Real petersson_norm(const Eigenform& form, const Real& eps) {
  return petersson_core(form.weight(), embedded_coeffs(form), eps, Real(1l),
                        Real(form.weight() + 1) / Real(2l));
}

Real petersson_norm(const Eigenform& form) {
  return petersson_norm(form, eps_bits(100));
}

Real petersson_norm_expansion(const QExpansion& f, const Real& eps,
                              const Real& tail_const, long tail_power) {
  if (!(f.coefficient(0) == 0))
    throw std::domain_error("petersson_norm: non-cuspidal input diverges");
  std::vector<Real> a(static_cast<std::size_t>(f.truncation()) + 1);
  for (long n = 0; n <= f.truncation(); ++n) a[n] = Real(f.coefficient(n));
  return petersson_core(f.weight(), a, eps, tail_const, Real(tail_power));
}

// ---------------------------------------------------------------------------
// Coefficient cache
// ---------------------------------------------------------------------------

void save_coefficient_cache(const std::string& path, const Eigenform& form) {
  nlohmann::json j;
  j["weight"] = form.weight();
  j["embedding"] = form.embedding();
  std::vector<ExactInteger> mp = {ExactInteger(0), ExactInteger(1)};
  for (long n = 0; n <= form.truncation(); ++n)
    if (form.a_exact(n).degree() == 2) {
      mp = form.a_exact(n).minimal_polynomial();
      break;
    }
  const long deg = static_cast<long>(mp.size()) - 1;
  {
    std::vector<std::string> fp;
    for (const auto& z : mp) fp.push_back(z.get_str());
    j["field_poly"] = fp;
  }
  nlohmann::json coeffs = nlohmann::json::array();
  for (long n = 0; n <= form.truncation(); ++n) {
    const NumberFieldElement& c = form.a_exact(n);
    std::vector<std::string> entry;
    if (c.degree() == 2) {
      for (const auto& q : c.coordinates()) {
        entry.push_back(q.get_num().get_str());
        entry.push_back(q.get_den().get_str());
      }
    } else {
      ExactRational q = c.rational_value();
      entry.push_back(q.get_num().get_str());
      entry.push_back(q.get_den().get_str());
      if (deg == 2) {
        entry.push_back("0");
        entry.push_back("1");
      }
    }
    coeffs.push_back(entry);
  }
  j["coeffs"] = std::move(coeffs);
  std::ofstream out(path);
  if (!out)
    throw std::runtime_error("coefficient cache: cannot open " + path +
                             " for writing");
  out << j.dump(1) << "\n";
  if (!out)
    throw std::runtime_error("coefficient cache: write failed on " + path);
}

Eigenform load_coefficient_cache(const std::string& path) {
  std::ifstream in(path);
  if (!in)
    throw std::runtime_error("coefficient cache: cannot open " + path);
  nlohmann::json j = nlohmann::json::parse(in);
  const long weight = j.at("weight").get<long>();
  const int embedding = j.at("embedding").get<int>();
  std::vector<ExactInteger> mp;
  for (const auto& s : j.at("field_poly").get<std::vector<std::string>>())
    mp.emplace_back(s);
  if (mp.size() != 2 && mp.size() != 3)
    throw std::runtime_error(
        "coefficient cache: field polynomial must have degree 1 or 2");
  const bool quad = mp.size() == 3;
  auto to_q = [](const std::string& num, const std::string& den) {
    ExactInteger n(num), d(den);
    if (d == 0)
      throw std::runtime_error("coefficient cache: zero denominator");
    return frac_q(n, d);
  };
  std::vector<NumberFieldElement> coeffs;
  for (const auto& e : j.at("coeffs")) {
    auto v = e.get<std::vector<std::string>>();
    if (!quad) {
      if (v.size() != 2)
        throw std::runtime_error("coefficient cache: malformed coefficient");
      coeffs.emplace_back(to_q(v[0], v[1]));
    } else {
      if (v.size() != 4)
        throw std::runtime_error("coefficient cache: malformed coefficient");
      coeffs.push_back(NumberFieldElement::quadratic(mp, to_q(v[0], v[1]),
                                                     to_q(v[2], v[3])));
    }
  }
  return Eigenform(weight, std::move(coeffs), embedding);
}

}  // namespace symsix
