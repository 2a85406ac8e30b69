#include "symsix/halfint.hpp"

#include "symsix/quadrature.hpp"
#include "symsix/rational.hpp"

#include <algorithm>
#include <iterator>
#include <stdexcept>
#include <utility>

namespace symsix {

namespace {

bool is_prime_small(long p) {
  if (p < 2) return false;
  for (long d = 2; d * d <= p; ++d)
    if (p % d == 0) return false;
  return true;
}

// prime factorization by trial division (inputs here are small)
std::vector<std::pair<long, int>> factor_small(long n) {
  std::vector<std::pair<long, int>> out;
  for (long p = 2; p * p <= n; ++p) {
    if (n % p) continue;
    int e = 0;
    while (n % p == 0) {
      n /= p;
      ++e;
    }
    out.push_back({p, e});
  }
  if (n > 1) out.push_back({n, 1});
  return out;
}

long mobius_small(long n) {
  long mu = 1;
  for (const auto& pe : factor_small(n)) {
    if (pe.second > 1) return 0;
    mu = -mu;
  }
  return mu;
}

ExactInteger power_z(long base, long e) {
  ExactInteger r;
  mpz_ui_pow_ui(r.get_mpz_t(), static_cast<unsigned long>(base),
                static_cast<unsigned long>(e));
  return r;
}

ExactInteger sigma_power(long n, long e) {
  ExactInteger s(0);
  for (long d = 1; d <= n; ++d)
    if (n % d == 0) s += power_z(d, e);
  return s;
}

int kronecker_ll(long a, long b) {
  ExactInteger za(a), zb(b);
  return mpz_kronecker(za.get_mpz_t(), zb.get_mpz_t());
}

// write m (= 0 or 1 mod 4, m != 0) as D * f^2 with D a fundamental
// discriminant (or D = 1 for square m > 0)
void fundamental_split(long m, long& D, long& f) {
  long sign = m < 0 ? -1 : 1;
  long n = m < 0 ? -m : m;
  long square_free = 1, square_root = 1;
  for (const auto& pe : factor_small(n)) {
    for (int i = 0; i + 1 < pe.second; i += 2) square_root *= pe.first;
    if (pe.second % 2) square_free *= pe.first;
  }
  square_free *= sign;
  if (((square_free % 4) + 4) % 4 == 1) {
    D = square_free;
    f = square_root;
  } else {
    D = 4 * square_free;
    if (square_root % 2)
      throw std::logic_error("fundamental_split: input not 0, 1 mod 4");
    f = square_root / 2;
  }
}

}  // namespace

ExactRational generalized_bernoulli(long r, long D) {
  if (r < 1) throw std::invalid_argument("generalized_bernoulli: r >= 1");
  if (D == 0) throw std::invalid_argument("generalized_bernoulli: D != 0");
  long aD = D < 0 ? -D : D;
  ExactRational sum(0);
  for (long a = 1; a <= aD; ++a) {
    int chi = kronecker_ll(D, a);
    if (chi == 0) continue;
    ExactRational term =
        bernoulli_poly_q(static_cast<unsigned long>(r), frac_q(a, aD));
    sum += ExactRational(chi) * term;
  }
  return ExactRational(power_z(aD, r - 1)) * sum;
}

ExactRational cohen_h(long r, long N) {
  if (r < 1) throw std::invalid_argument("cohen_h: r >= 1");
  if (N < 0) throw std::invalid_argument("cohen_h: N >= 0");
  if (N == 0)
    return -bernoulli_q(static_cast<unsigned long>(2 * r)) /
           ExactRational(2 * r);
  long m = (r % 2) ? -N : N;
  long mm = ((m % 4) + 4) % 4;
  if (mm == 2 || mm == 3) return ExactRational(0);
  long D = 0, f = 0;
  fundamental_split(m, D, f);
  ExactRational lval = -generalized_bernoulli(r, D) / ExactRational(r);
  ExactRational divisor_sum(0);
  for (long d = 1; d <= f; ++d) {
    if (f % d) continue;
    long mu = mobius_small(d);
    if (mu == 0) continue;
    int chi = kronecker_ll(D, d);
    if (chi == 0) continue;
    divisor_sum += ExactRational(mu * chi) * ExactRational(power_z(d, r - 1)) *
                   ExactRational(sigma_power(f / d, 2 * r - 1));
  }
  return lval * divisor_sum;
}

// ---------------------------------------------------------------------------
// PlusSpaceForm

PlusSpaceForm::PlusSpaceForm(long kappa, std::vector<ExactRational> coeffs)
    : kappa_(kappa), c_(std::move(coeffs)) {
  if (kappa_ < 1) throw std::invalid_argument("PlusSpaceForm: kappa >= 1");
  if (c_.empty()) throw std::invalid_argument("PlusSpaceForm: empty data");
  for (std::size_t n = 0; n < c_.size(); ++n) {
    std::size_t m = n % 4;
    if ((m == 1 || m == 2) && c_[n] != 0)
      throw std::invalid_argument(
          "PlusSpaceForm: support must avoid 1, 2 mod 4");
  }
}

const ExactRational& PlusSpaceForm::coefficient(long n) const {
  if (n < 0 || n > truncation())
    throw std::out_of_range("PlusSpaceForm: coefficient index");
  return c_[static_cast<std::size_t>(n)];
}

bool PlusSpaceForm::is_cuspidal() const { return c_[0] == 0; }

PlusSpaceForm operator*(const ExactRational& s, const PlusSpaceForm& h) {
  std::vector<ExactRational> c = h.c_;
  for (auto& x : c) x *= s;
  return PlusSpaceForm(h.kappa_, std::move(c));
}

std::vector<ExactRational> plus_hecke_square(const PlusSpaceForm& h, long p) {
  if (!is_prime_small(p))
    throw std::invalid_argument("plus_hecke_square: p must be prime");
  long kappa = h.kappa();
  long nmax = h.truncation() / (p * p);
  ExactRational pk1(power_z(p, kappa - 1));
  ExactRational pk2(power_z(p, 2 * kappa - 1));
  std::vector<ExactRational> out(static_cast<std::size_t>(nmax) + 1,
                                 ExactRational(0));
  for (long n = 0; n <= nmax; ++n) {
    long m = n % 4;
    if (m == 1 || m == 2) continue;  // the image keeps the support classes
    ExactRational v = h.coefficient(p * p * n);
    long arg = (kappa % 2) ? -n : n;
    int chi = kronecker_ll(arg, p);
    if (chi != 0) v += ExactRational(chi) * pk1 * h.coefficient(n);
    if (n % (p * p) == 0) v += pk2 * h.coefficient(n / (p * p));
    out[static_cast<std::size_t>(n)] = v;
  }
  return out;
}

// ---------------------------------------------------------------------------
// JacobiForm

JacobiForm::JacobiForm(long weight, std::vector<ExactRational> h0,
                       std::vector<ExactRational> h1)
    : weight_(weight), h0_(std::move(h0)), h1_(std::move(h1)) {
  if (weight_ < 2) throw std::invalid_argument("JacobiForm: weight >= 2");
  if (h0_.empty() || h0_.size() != h1_.size())
    throw std::invalid_argument("JacobiForm: components need equal length");
  for (std::size_t j = 0; j < h0_.size(); ++j) {
    if (j % 4 != 0 && h0_[j] != 0)
      throw std::invalid_argument("JacobiForm: even component support 0 mod 4");
    if (j % 4 != 3 && h1_[j] != 0)
      throw std::invalid_argument("JacobiForm: odd component support 3 mod 4");
  }
}

const std::vector<ExactRational>& JacobiForm::theta_component(int mu) const {
  if (mu == 0) return h0_;
  if (mu == 1) return h1_;
  throw std::invalid_argument("JacobiForm: component index is 0 or 1");
}

ExactRational JacobiForm::coefficient(long n, long r) const {
  long N = 4 * n - r * r;
  if (N < 0) return ExactRational(0);
  if (N > truncation())
    throw std::out_of_range("JacobiForm: coefficient beyond truncation");
  long mu = ((r % 2) + 2) % 2;
  return (mu == 0 ? h0_ : h1_)[static_cast<std::size_t>(N)];
}

bool JacobiForm::is_cuspidal() const { return h0_[0] == 0; }

JacobiForm operator+(const JacobiForm& a, const JacobiForm& b) {
  if (a.weight_ != b.weight_)
    throw std::invalid_argument("JacobiForm: weight mismatch in sum");
  std::size_t n = std::min(a.h0_.size(), b.h0_.size());
  std::vector<ExactRational> h0(n), h1(n);
  for (std::size_t j = 0; j < n; ++j) {
    h0[j] = a.h0_[j] + b.h0_[j];
    h1[j] = a.h1_[j] + b.h1_[j];
  }
  return JacobiForm(a.weight_, std::move(h0), std::move(h1));
}

JacobiForm operator-(const JacobiForm& a, const JacobiForm& b) {
  return a + (ExactRational(-1) * b);
}

JacobiForm operator*(const ExactRational& s, const JacobiForm& F) {
  std::vector<ExactRational> h0 = F.h0_, h1 = F.h1_;
  for (auto& x : h0) x *= s;
  for (auto& x : h1) x *= s;
  return JacobiForm(F.weight_, std::move(h0), std::move(h1));
}

JacobiForm operator*(const QExpansion& f, const JacobiForm& F) {
  long trunc = std::min<long>(F.truncation(), 4 * f.truncation());
  std::vector<ExactRational> h0(static_cast<std::size_t>(trunc) + 1,
                                ExactRational(0));
  std::vector<ExactRational> h1 = h0;
  for (long i = 0; 4 * i <= trunc; ++i) {
    const ExactRational& fi = f.coefficient(i);
    if (fi == 0) continue;
    for (long j = 4 * i; j <= trunc; ++j) {
      std::size_t src = static_cast<std::size_t>(j - 4 * i);
      std::size_t dst = static_cast<std::size_t>(j);
      if (F.h0_[src] != 0) h0[dst] += fi * F.h0_[src];
      if (F.h1_[src] != 0) h1[dst] += fi * F.h1_[src];
    }
  }
  return JacobiForm(f.weight() + F.weight_, std::move(h0), std::move(h1));
}

JacobiForm jacobi_eisenstein(long k, long N) {
  if (k != 4 && k != 6)
    throw std::invalid_argument("jacobi_eisenstein: weight must be 4 or 6");
  if (N < 4) throw std::invalid_argument("jacobi_eisenstein: N >= 4");
  long r = k - 1;
  ExactRational norm = cohen_h(r, 0);
  std::vector<ExactRational> h0(static_cast<std::size_t>(N) + 1,
                                ExactRational(0));
  std::vector<ExactRational> h1 = h0;
  for (long j = 0; j <= N; ++j) {
    long m = j % 4;
    if (m == 1 || m == 2) continue;
    (m == 0 ? h0 : h1)[static_cast<std::size_t>(j)] = cohen_h(r, j) / norm;
  }
  return JacobiForm(k, std::move(h0), std::move(h1));
}

std::vector<JacobiForm> jacobi_cusp_space(long k, long N) {
  if (k < 8 || k % 2)
    throw std::invalid_argument("jacobi_cusp_space: even weight >= 8");
  long n4 = N / 4;
  if (n4 < 2) throw std::invalid_argument("jacobi_cusp_space: N too small");
  long T = 4 * n4;
  JacobiForm e41 = jacobi_eisenstein(4, T);
  JacobiForm e61 = jacobi_eisenstein(6, T);
  std::vector<JacobiForm> candidates;
  for (const QExpansion& b : victor_miller_basis(k - 4, n4))
    candidates.push_back(b * e41);
  for (const QExpansion& b : victor_miller_basis(k - 6, n4))
    candidates.push_back(b * e61);
  if (candidates.empty()) return {};

  // row-reduce over the support indices 0, 3, 4, 7, 8, ...
  std::vector<long> support;
  for (long j = 0; j <= T; ++j)
    if (j % 4 == 0 || j % 4 == 3) support.push_back(j);
  std::vector<std::vector<ExactRational>> rows;
  for (const JacobiForm& F : candidates) {
    std::vector<ExactRational> row;
    row.reserve(support.size());
    for (long j : support)
      row.push_back(
          F.theta_component(j % 4 == 0 ? 0 : 1)[static_cast<std::size_t>(j)]);
    rows.push_back(std::move(row));
  }
  std::size_t nrow = rows.size(), ncol = support.size(), lead = 0;
  for (std::size_t col = 0; col < ncol && lead < nrow; ++col) {
    std::size_t piv = lead;
    while (piv < nrow && rows[piv][col] == 0) ++piv;
    if (piv == nrow) continue;
    std::swap(rows[piv], rows[lead]);
    ExactRational inv = ExactRational(1) / rows[lead][col];
    for (std::size_t j = col; j < ncol; ++j) rows[lead][j] *= inv;
    for (std::size_t i = 0; i < nrow; ++i) {
      if (i == lead || rows[i][col] == 0) continue;
      ExactRational fac = rows[i][col];
      for (std::size_t j = col; j < ncol; ++j)
        rows[i][j] -= fac * rows[lead][j];
    }
    ++lead;
  }
  std::vector<JacobiForm> cusp;
  for (std::size_t i = 0; i < lead; ++i) {
    if (rows[i][0] != 0) continue;  // the non-cuspidal direction
    std::vector<ExactRational> h0(static_cast<std::size_t>(T) + 1,
                                  ExactRational(0));
    std::vector<ExactRational> h1 = h0;
    bool nonzero = false;
    for (std::size_t s = 0; s < ncol; ++s) {
      if (rows[i][s] == 0) continue;
      nonzero = true;
      long j = support[s];
      (j % 4 == 0 ? h0 : h1)[static_cast<std::size_t>(j)] = rows[i][s];
    }
    if (nonzero) cusp.emplace_back(k, std::move(h0), std::move(h1));
  }
  return cusp;
}

PlusSpaceForm plus_form_from_jacobi(const JacobiForm& F) {
  long T = F.truncation();
  std::vector<ExactRational> c(static_cast<std::size_t>(T) + 1,
                               ExactRational(0));
  for (long n = 0; n <= T; ++n) {
    long m = n % 4;
    if (m == 1 || m == 2) continue;
    c[static_cast<std::size_t>(n)] =
        F.theta_component(m == 0 ? 0 : 1)[static_cast<std::size_t>(n)];
  }
  return PlusSpaceForm(F.weight() - 1, std::move(c));
}

JacobiForm jacobi_from_plus(const PlusSpaceForm& h) {
  long T = h.truncation();
  std::vector<ExactRational> h0(static_cast<std::size_t>(T) + 1,
                                ExactRational(0));
  std::vector<ExactRational> h1 = h0;
  for (long n = 0; n <= T; ++n) {
    long m = n % 4;
    if (m == 1 || m == 2) continue;
    (m == 0 ? h0 : h1)[static_cast<std::size_t>(n)] = h.coefficient(n);
  }
  return JacobiForm(h.kappa() + 1, std::move(h0), std::move(h1));
}

// ---------------------------------------------------------------------------
// NearlyHolomorphicForm

NearlyHolomorphicForm::NearlyHolomorphicForm(
    ExactRational weight, std::vector<std::vector<ExactRational>> parts)
    : weight_(std::move(weight)), parts_(std::move(parts)) {
  if (parts_.empty())
    throw std::invalid_argument("NearlyHolomorphicForm: needs a part");
  std::size_t len = 0;
  for (const auto& part : parts_) len = std::max(len, part.size());
  if (len == 0) len = 1;
  for (auto& part : parts_) part.resize(len, ExactRational(0));
  auto all_zero = [](const std::vector<ExactRational>& v) {
    for (const auto& x : v)
      if (x != 0) return false;
    return true;
  };
  while (parts_.size() > 1 && all_zero(parts_.back())) parts_.pop_back();
}

NearlyHolomorphicForm NearlyHolomorphicForm::holomorphic(const QExpansion& f) {
  std::vector<ExactRational> part(
      static_cast<std::size_t>(4 * f.truncation()) + 1, ExactRational(0));
  for (long n = 0; n <= f.truncation(); ++n)
    part[static_cast<std::size_t>(4 * n)] = f.coefficient(n);
  return NearlyHolomorphicForm(ExactRational(f.weight()), {std::move(part)});
}

bool NearlyHolomorphicForm::is_zero() const {
  for (const auto& part : parts_)
    for (const auto& x : part)
      if (x != 0) return false;
  return true;
}

std::vector<ExactRational> NearlyHolomorphicForm::integer_part(long m) const {
  if (m < 0 || m > depth())
    throw std::out_of_range("NearlyHolomorphicForm: part index");
  const auto& part = parts_[static_cast<std::size_t>(m)];
  std::vector<ExactRational> out(part.size() / 4 + 1, ExactRational(0));
  for (std::size_t j = 0; j < part.size(); ++j) {
    if (j % 4 == 0)
      out[j / 4] = part[j];
    else if (part[j] != 0)
      throw std::domain_error(
          "NearlyHolomorphicForm: support off the integer grid");
  }
  return out;
}

NearlyHolomorphicForm operator*(const ExactRational& s,
                                const NearlyHolomorphicForm& f) {
  auto parts = f.parts_;
  for (auto& part : parts)
    for (auto& x : part) x *= s;
  return NearlyHolomorphicForm(f.weight_, std::move(parts));
}

NearlyHolomorphicForm operator+(const NearlyHolomorphicForm& a,
                                const NearlyHolomorphicForm& b) {
  if (a.weight_ != b.weight_)
    throw std::invalid_argument("NearlyHolomorphicForm: weight mismatch");
  std::size_t n = std::min(a.parts_[0].size(), b.parts_[0].size());
  std::size_t dmax = std::max(a.parts_.size(), b.parts_.size());
  std::vector<std::vector<ExactRational>> parts(
      dmax, std::vector<ExactRational>(n, ExactRational(0)));
  for (std::size_t m = 0; m < dmax; ++m)
    for (std::size_t j = 0; j < n; ++j) {
      if (m < a.parts_.size()) parts[m][j] += a.parts_[m][j];
      if (m < b.parts_.size()) parts[m][j] += b.parts_[m][j];
    }
  return NearlyHolomorphicForm(a.weight_, std::move(parts));
}

NearlyHolomorphicForm operator-(const NearlyHolomorphicForm& a,
                                const NearlyHolomorphicForm& b) {
  return a + (ExactRational(-1) * b);
}

// ---------------------------------------------------------------------------
// OperatorExpansion

OperatorExpansion::OperatorExpansion(const JacobiForm& F) {
  weight_ = F.weight();
  long T = F.truncation();
  long R = 0;
  while ((R + 1) * (R + 1) <= T) ++R;
  for (long r = -R; r <= R; ++r) {
    const auto& comp = F.theta_component(static_cast<int>(((r % 2) + 2) % 2));
    std::vector<ExactRational> series(static_cast<std::size_t>(T) + 1,
                                      ExactRational(0));
    bool nonzero = false;
    for (long j = r * r; j <= T; ++j) {
      const ExactRational& v = comp[static_cast<std::size_t>(j - r * r)];
      if (v == 0) continue;
      series[static_cast<std::size_t>(j)] = v;
      nonzero = true;
    }
    if (nonzero) terms_[{0, 0, 0}][r] = std::move(series);
  }
}

namespace {

void add_scaled(std::map<long, std::vector<ExactRational>>& dst, long r,
                const std::vector<ExactRational>& src,
                const ExactRational& scale) {
  if (scale == 0) return;
  auto& tgt = dst[r];
  if (tgt.size() < src.size()) tgt.resize(src.size(), ExactRational(0));
  for (std::size_t j = 0; j < src.size(); ++j)
    if (src[j] != 0) tgt[j] += scale * src[j];
}

}  // namespace

OperatorExpansion OperatorExpansion::scaled_z_derivative() const {
  OperatorExpansion out;
  out.weight_ = weight_ + 1;
  for (const auto& [key, rmap] : terms_) {
    auto [k, l, m] = key;
    for (const auto& [r, series] : rmap) {
      if (k >= 1)
        add_scaled(out.terms_[{k - 1, l, m}], r, series, ExactRational(-4 * k));
      add_scaled(out.terms_[{k, l, m}], r, series, ExactRational(-4 * r));
    }
  }
  out.prune();
  return out;
}

OperatorExpansion OperatorExpansion::cross_multiply() const {
  OperatorExpansion out;
  out.weight_ = weight_ + 1;
  for (const auto& [key, rmap] : terms_) {
    auto [k, l, m] = key;
    for (const auto& [r, series] : rmap) {
      add_scaled(out.terms_[{k + 1, l, m + 1}], r, series, ExactRational(8));
      add_scaled(out.terms_[{k, l + 1, m + 1}], r, series, ExactRational(-8));
    }
  }
  out.prune();
  return out;
}

OperatorExpansion OperatorExpansion::apply() const {
  OperatorExpansion out;
  out.weight_ = weight_ + 1;
  for (const auto& [key, rmap] : terms_) {
    auto [k, l, m] = key;
    for (const auto& [r, series] : rmap) {
      if (k >= 1)
        add_scaled(out.terms_[{k - 1, l, m}], r, series, ExactRational(-4 * k));
      add_scaled(out.terms_[{k, l, m}], r, series, ExactRational(-4 * r));
      add_scaled(out.terms_[{k + 1, l, m + 1}], r, series, ExactRational(8));
      add_scaled(out.terms_[{k, l + 1, m + 1}], r, series, ExactRational(-8));
    }
  }
  out.prune();
  return out;
}

void OperatorExpansion::prune() {
  auto zero = [](const std::vector<ExactRational>& v) {
    for (const auto& x : v)
      if (x != 0) return false;
    return true;
  };
  for (auto it = terms_.begin(); it != terms_.end();) {
    for (auto jt = it->second.begin(); jt != it->second.end();)
      jt = zero(jt->second) ? it->second.erase(jt) : std::next(jt);
    it = it->second.empty() ? terms_.erase(it) : std::next(it);
  }
}

bool OperatorExpansion::operator==(const OperatorExpansion& other) const {
  if (weight_ != other.weight_) return false;
  auto series_equal = [](const std::vector<ExactRational>& a,
                         const std::vector<ExactRational>& b) {
    std::size_t n = std::max(a.size(), b.size());
    for (std::size_t j = 0; j < n; ++j) {
      const ExactRational va = j < a.size() ? a[j] : ExactRational(0);
      const ExactRational vb = j < b.size() ? b[j] : ExactRational(0);
      if (va != vb) return false;
    }
    return true;
  };
  if (terms_.size() != other.terms_.size()) return false;
  for (const auto& [key, rmap] : terms_) {
    auto it = other.terms_.find(key);
    if (it == other.terms_.end()) return false;
    if (rmap.size() != it->second.size()) return false;
    for (const auto& [r, series] : rmap) {
      auto jt = it->second.find(r);
      if (jt == it->second.end()) return false;
      if (!series_equal(series, jt->second)) return false;
    }
  }
  return true;
}

NearlyHolomorphicForm OperatorExpansion::restrict_elliptic() const {
  long dmax = 0;
  std::size_t len = 1;
  for (const auto& [key, rmap] : terms_) {
    auto [k, l, m] = key;
    if (k != 0 || l != 0) continue;
    dmax = std::max<long>(dmax, m);
    for (const auto& [r, series] : rmap) len = std::max(len, series.size());
  }
  std::vector<std::vector<ExactRational>> parts(
      static_cast<std::size_t>(dmax) + 1,
      std::vector<ExactRational>(len, ExactRational(0)));
  for (const auto& [key, rmap] : terms_) {
    auto [k, l, m] = key;
    if (k != 0 || l != 0) continue;
    for (const auto& [r, series] : rmap)
      for (std::size_t j = 0; j < series.size(); ++j)
        if (series[j] != 0) parts[static_cast<std::size_t>(m)][j] += series[j];
  }
  return NearlyHolomorphicForm(ExactRational(weight_), std::move(parts));
}

NearlyHolomorphicForm delta_power_restrict(const JacobiForm& F, long power) {
  if (power < 0)
    throw std::invalid_argument("delta_power_restrict: power >= 0");
  OperatorExpansion e(F);
  for (long i = 0; i < power; ++i) e = e.apply();
  return e.restrict_elliptic();
}

// ---------------------------------------------------------------------------
// Maass-Shimura ladder

NearlyHolomorphicForm maass_shimura_apply(const NearlyHolomorphicForm& f,
                                          long steps) {
  if (steps < 0) throw std::invalid_argument("maass_shimura_apply: steps >= 0");
  ExactRational w = f.weight();
  auto parts = f.parts();
  for (long s = 0; s < steps; ++s) {
    std::size_t d = parts.size();
    std::size_t len = parts[0].size();
    std::vector<std::vector<ExactRational>> next(
        d + 1, std::vector<ExactRational>(len, ExactRational(0)));
    for (std::size_t m = 0; m < d; ++m) {
      for (std::size_t j = 0; j < len; ++j) {
        if (parts[m][j] == 0) continue;
        next[m][j] += frac_q(static_cast<long>(j), 4) * parts[m][j];
        next[m + 1][j] +=
            (ExactRational(static_cast<long>(m)) - w) * parts[m][j];
      }
    }
    parts = std::move(next);
    w += 2;
  }
  return NearlyHolomorphicForm(w, std::move(parts));
}

std::vector<std::vector<ExactRational>> raising_decomposition(
    const NearlyHolomorphicForm& f) {
  ExactRational w = f.weight();
  long d = f.depth();
  std::vector<std::vector<ExactRational>> us(static_cast<std::size_t>(d) + 1);
  NearlyHolomorphicForm rem = f;
  for (long p = d; p >= 1; --p) {
    if (rem.depth() < p) {
      us[static_cast<std::size_t>(p)] =
          std::vector<ExactRational>(rem.parts()[0].size(), ExactRational(0));
      continue;
    }
    ExactRational cp(1);
    for (long i = 0; i < p; ++i) cp *= ExactRational(2 * p - i) - w;
    if (cp == 0)
      throw std::invalid_argument(
          "raising_decomposition: ladder constant vanishes at this weight");
    std::vector<ExactRational> up = rem.parts()[static_cast<std::size_t>(p)];
    ExactRational inv = ExactRational(1) / cp;
    for (auto& x : up) x *= inv;
    us[static_cast<std::size_t>(p)] = up;
    NearlyHolomorphicForm lifted = maass_shimura_apply(
        NearlyHolomorphicForm(w - ExactRational(2 * p), {std::move(up)}), p);
    rem = rem - lifted;
    if (rem.depth() >= p) {
      for (const auto& x : rem.parts()[static_cast<std::size_t>(p)])
        if (x != 0)
          throw std::logic_error("raising_decomposition: peel did not descend");
    }
  }
  us[0] = rem.parts()[0];
  return us;
}

// ---------------------------------------------------------------------------
// Evaluation

BigComplex evaluate_jacobi(const JacobiForm& F, const BigComplex& tau,
                           const BigComplex& z) {
  Real y = tau.im;
  if (!(y >= Real(ExactRational(1, 2))))
    throw std::domain_error("evaluate_jacobi: Im tau >= 1/2 required");
  Real iz = abs(z.im);
  Real lambda = Real(4l) * iz / y;  // elliptic-variable growth rate
  if (!(lambda <= Real(5l)))
    throw std::domain_error("evaluate_jacobi: |Im z| <= 5 Im(tau)/4 required");
  long T = F.truncation();
  const BigComplex two_pi_i(Real(0l), Real(2l) * const_pi());
  BigComplex qq = exp(two_pi_i * tau / BigComplex(4l));
  BigComplex zeta = exp(two_pi_i * z);
  Real aqq = abs(qq);

  // lattice cutoff: |qq^{r^2} zeta^r| <= aqq^{r^2 - lambda |r|}, so push R
  // until the first omitted exponent overshoots the working precision
  long R = 6;
  Real tiny = eps_bits(working_bits() / 2 + 40);
  while (R < 2000) {
    Real first = Real(R + 1) * (Real(R + 1) - lambda);
    if (Real(R + 1) - lambda >= Real(1l) && pow(aqq, first) < tiny) break;
    ++R;
  }
  Real theta_tail = Real(2l) *
                    pow(aqq, Real(R + 1) * (Real(R + 1) - lambda)) /
                    (Real(1l) - aqq * aqq);

  BigComplex total(0l);
  Real habs_max(0l), tabs_max(0l), cmax(0l);
  for (int mu = 0; mu < 2; ++mu) {
    const auto& comp = F.theta_component(mu);
    BigComplex hval(0l);
    Real habs(0l);
    for (long j = T; j >= 0; --j) {
      hval = hval * qq;
      habs = habs * aqq;
      const ExactRational& c = comp[static_cast<std::size_t>(j)];
      if (c != 0) {
        Real cr(c);
        hval += BigComplex(cr);
        Real ac = abs(cr);
        habs += ac;
        if (ac > cmax) cmax = ac;
      }
    }
    BigComplex tval(0l);
    Real tabs(0l);
    for (long r = -R; r <= R; ++r) {
      if (((r % 2) + 2) % 2 != mu) continue;
      BigComplex term = pow(qq, r * r) * pow(zeta, r);
      tval += term;
      tabs += abs(term);
    }
    total += hval * tval;
    if (habs > habs_max) habs_max = habs;
    if (tabs > tabs_max) tabs_max = tabs;
  }

  Real comp_tail = cmax * pow(aqq, T + 1) / (Real(1l) - aqq);
  Real residual =
      Real(2l) * (comp_tail * (tabs_max + theta_tail) + habs_max * theta_tail);
  Real scale = max(abs(total), Real(1l));
  if (!(residual <= Real(1e-20) * scale))
    throw std::runtime_error("evaluate_jacobi: truncation insufficient");
  return total;
}

BigComplex evaluate_nearly(const NearlyHolomorphicForm& f,
                           const BigComplex& tau) {
  Real y = tau.im;
  if (!(y > Real(0l)))
    throw std::domain_error("evaluate_nearly: upper half-plane required");
  const BigComplex two_pi_i(Real(0l), Real(2l) * const_pi());
  BigComplex qq = exp(two_pi_i * tau / BigComplex(4l));
  Real aqq = abs(qq);
  Real wfac = Real(4l) * const_pi() * y;
  BigComplex total(0l);
  Real cmax(0l);
  for (long m = 0; m <= f.depth(); ++m) {
    const auto& part = f.parts()[static_cast<std::size_t>(m)];
    BigComplex s(0l);
    for (long j = static_cast<long>(part.size()) - 1; j >= 0; --j) {
      s = s * qq;
      const ExactRational& c = part[static_cast<std::size_t>(j)];
      if (c != 0) {
        Real cr(c);
        s += BigComplex(cr);
        Real ac = abs(cr);
        if (ac > cmax) cmax = ac;
      }
    }
    total += s * BigComplex(pow(wfac, -m));
  }
  long len = static_cast<long>(f.parts()[0].size());
  Real wext = max(Real(1l), pow(wfac, -f.depth()));
  Real residual =
      Real(f.depth() + 1) * cmax * pow(aqq, len) / (Real(1l) - aqq) * wext;
  Real scale = max(abs(total), Real(1l));
  if (!(residual <= eps_bits(40) * scale))
    throw std::runtime_error("evaluate_nearly: truncation insufficient");
  return total;
}

namespace {

// transport matrix for the two-component vector of a weight-(k - 1/2) form:
// V(original) = A * V(reduced), maintained while the point walks into the
// standard fundamental domain
struct ComponentWalker {
  std::vector<Real> c0, c1;  // embedded quarter-grid coefficients
  long k = 0;                // integer k; the form has weight k - 1/2
  Real cmax = Real(0l);

  static BigComplex unit_power(long n) {
    // (-i)^n, the translation twist of the odd component
    switch (((n % 4) + 4) % 4) {
      case 0:
        return BigComplex(1l);
      case 1:
        return BigComplex(Real(0l), Real(-1l));
      case 2:
        return BigComplex(-1l);
      default:
        return BigComplex(Real(0l), Real(1l));
    }
  }

  // value of h0(4w) + h1(4w)
  BigComplex eval_plus(const BigComplex& w) const {
    auto pr = eval_pair(BigComplex(4l) * w);
    return pr.first + pr.second;
  }

  std::pair<BigComplex, BigComplex> eval_pair(BigComplex tau) const {
    BigComplex a00(1l), a01(0l), a10(0l), a11(1l);
    for (int guard = 0;; ++guard) {
      if (guard > 200)
        throw std::runtime_error("component transport: reduction stalled");
      Real n = floor(tau.re + Real(ExactRational(1, 2)));
      if (!n.is_zero()) {
        tau.re -= n;
        BigComplex tw = unit_power(n.to_long());
        a01 = a01 * tw;
        a11 = a11 * tw;
      }
      if (norm_sq(tau) < Real(1l) - eps_bits(100)) {
        BigComplex next = BigComplex(-1l) / tau;
        // V(-1/t) = (c(t)/2) [[1,1],[1,-1]] V(t), with t the new point and
        // c(t) = t^k (-i t / 2)^{-1/2} on the principal branch
        BigComplex half_neg_i(Real(0l), Real(ExactRational(-1, 2)));
        BigComplex c = pow(next, k) / sqrt(half_neg_i * next);
        BigComplex h = c * BigComplex(Real(ExactRational(1, 2)));
        BigComplex n00 = (a00 + a01) * h;
        BigComplex n01 = (a00 - a01) * h;
        BigComplex n10 = (a10 + a11) * h;
        BigComplex n11 = (a10 - a11) * h;
        a00 = n00;
        a01 = n01;
        a10 = n10;
        a11 = n11;
        tau = next;
        continue;
      }
      break;
    }
    const BigComplex two_pi_i(Real(0l), Real(2l) * const_pi());
    BigComplex qq = exp(two_pi_i * tau / BigComplex(4l));
    BigComplex v0(0l), v1(0l);
    for (long j = static_cast<long>(c0.size()) - 1; j >= 0; --j) {
      v0 = v0 * qq;
      v1 = v1 * qq;
      if (!c0[static_cast<std::size_t>(j)].is_zero())
        v0 += BigComplex(c0[static_cast<std::size_t>(j)]);
      if (!c1[static_cast<std::size_t>(j)].is_zero())
        v1 += BigComplex(c1[static_cast<std::size_t>(j)]);
    }
    // truncation certificate at the reduced point (|qq| <= e^{-pi sqrt3/4})
    Real aqq = abs(qq);
    Real mnorm = max(max(abs(a00), abs(a01)), max(abs(a10), abs(a11)));
    Real residual = Real(2l) * mnorm * cmax *
                    pow(aqq, static_cast<long>(c0.size())) / (Real(1l) - aqq);
    Real scale = max(Real(1l), mnorm * (abs(v0) + abs(v1)));
    if (!(residual <= eps_bits(64) * scale))
      throw std::runtime_error("component transport: truncation insufficient");
    return {a00 * v0 + a01 * v1, a10 * v0 + a11 * v1};
  }
};

ComponentWalker make_walker(const PlusSpaceForm& h) {
  ComponentWalker w;
  w.k = h.kappa() + 1;
  long T = h.truncation();
  w.c0.assign(static_cast<std::size_t>(T) + 1, Real(0l));
  w.c1.assign(static_cast<std::size_t>(T) + 1, Real(0l));
  for (long n = 0; n <= T; ++n) {
    long m = n % 4;
    if (m == 1 || m == 2) continue;
    Real v(h.coefficient(n));
    Real av = abs(v);
    if (av > w.cmax) w.cmax = av;
    (m == 0 ? w.c0 : w.c1)[static_cast<std::size_t>(n)] = v;
  }
  return w;
}

}  // namespace

BigComplex evaluate_plus(const PlusSpaceForm& h, const BigComplex& w) {
  if (!(w.im > Real(0l)))
    throw std::domain_error("evaluate_plus: upper half-plane required");
  return make_walker(h).eval_plus(w);
}

// ---------------------------------------------------------------------------
// Pairing over the full modular group

namespace {

// integral over (Y, infinity) of y^m e^{-c y} dy, for integer m >= 0
Real incomplete_exp(const Real& c, long m, const Real& Y) {
  Real sum(0l);
  Real coeff(1l);  // m! / (m - j)!
  Real ypow = pow(Y, m);
  for (long j = 0; j <= m; ++j) {
    sum += coeff * ypow / pow(c, j + 1);
    if (j < m) {
      coeff *= Real(m - j);
      ypow = ypow / Y;
    }
  }
  return sum * exp(-c * Y);
}

}  // namespace

BigComplex pairing_sl2z(const Eigenform& g, const NearlyHolomorphicForm& n,
                        const Real& eps) {
  long k = g.weight();
  if (n.weight() != ExactRational(k))
    throw std::invalid_argument("pairing_sl2z: weight mismatch");
  long depth = n.depth();
  if (k - 2 - depth < 0)
    throw std::invalid_argument("pairing_sl2z: depth too large for weight");

  long Ng = g.truncation();
  std::vector<Real> a(static_cast<std::size_t>(Ng) + 1, Real(0l));
  for (long j = 1; j <= Ng; ++j) a[static_cast<std::size_t>(j)] = g.a(j);

  std::vector<std::vector<Real>> b;
  std::vector<Real> rawbmax(static_cast<std::size_t>(depth) + 1, Real(0l));
  long Nb = -1;
  for (long m = 0; m <= depth; ++m) {
    auto exact = n.integer_part(m);
    std::vector<Real> row(exact.size());
    for (std::size_t j = 0; j < exact.size(); ++j) {
      row[j] = Real(exact[j]);
      Real av = abs(row[j]);
      if (av > rawbmax[static_cast<std::size_t>(m)])
        rawbmax[static_cast<std::size_t>(m)] = av;
    }
    long len = static_cast<long>(exact.size()) - 1;
    Nb = (Nb < 0) ? len : std::min(Nb, len);
    b.push_back(std::move(row));
  }
  long N = std::min(Ng, Nb);
  if (N < 8) throw std::invalid_argument("pairing_sl2z: truncation too small");

  // growth bounds: |a(j)| <= j^{(k+1)/2} holds exactly for a cusp eigenform;
  // the other factor gets an audited polynomial bound of degree k + 1
  Real mu_g = Real(k + 1) / Real(2l);
  Real mu_b = Real(k + 1);
  Real cb(0l);
  for (const auto& row : b)
    for (std::size_t j = 1; j < row.size(); ++j) {
      Real q = abs(row[j]) / pow(Real(static_cast<long>(j)), mu_b);
      if (q > cb) cb = q;
    }
  cb = cb * (Real(1l) + eps_bits(32)) + eps_bits(64);

  const Real pi = const_pi();
  const Real two_pi = Real(2l) * pi;
  const Real four_pi = Real(4l) * pi;

  // tail above height 2: term-by-term exponential integrals
  Real tail(0l);
  for (long m = 0; m <= depth; ++m) {
    const auto& row = b[static_cast<std::size_t>(m)];
    Real part(0l);
    for (long j = 1; j <= Ng && j < static_cast<long>(row.size()); ++j) {
      if (row[static_cast<std::size_t>(j)].is_zero()) continue;
      part += row[static_cast<std::size_t>(j)] *
              a[static_cast<std::size_t>(j)] *
              incomplete_exp(four_pi * Real(j), k - 2 - m, Real(2l));
    }
    tail += part * pow(four_pi, -m);
  }
  {
    Real mu = mu_g + mu_b;
    Real rho = pow(Real(N + 2) / Real(N + 1), mu) * exp(-four_pi * Real(2l));
    if (!(rho < Real(1l)))
      throw std::runtime_error("pairing_sl2z: tail ratio not contracting");
    Real lead = cb * pow(Real(N + 1), mu) *
                incomplete_exp(four_pi * Real(N + 1), k - 2, Real(2l));
    Real rem = lead / (Real(1l) - rho) * Real(depth + 1);
    if (!(rem <= eps))
      throw std::runtime_error("pairing_sl2z: tail remainder exceeds target");
  }

  // cell below height 2: exact x-integration of the cross-correlation at
  // each height, adaptive quadrature in y
  Real rawgmax(0l);
  for (long j = 1; j <= Ng; ++j) {
    Real av = abs(a[static_cast<std::size_t>(j)]);
    if (av > rawgmax) rawgmax = av;
  }
  Real tol_d = eps / (pow(Real(2l), k + 6) * Real(depth + 1));

  auto cell_integrand = [&](const Real& y) -> Real {
    Real t = exp(-two_pi * y);
    std::vector<Real> vg(static_cast<std::size_t>(Ng) + 1);
    {
      Real tp(1l);
      for (long j = 0; j <= Ng; ++j) {
        vg[static_cast<std::size_t>(j)] = a[static_cast<std::size_t>(j)] * tp;
        tp *= t;
      }
    }
    bool cut = y < Real(1l);
    Real x0(0l), s1(0l), c1(1l);
    if (cut) {
      x0 = sqrt((Real(1l) - y) * (Real(1l) + y));
      s1 = sin(two_pi * x0);
      c1 = cos(two_pi * x0);
    }
    Real total(0l);
    for (long m = 0; m <= depth; ++m) {
      const auto& row = b[static_cast<std::size_t>(m)];
      long nb = static_cast<long>(row.size()) - 1;
      std::vector<Real> vb(static_cast<std::size_t>(nb) + 1);
      {
        Real tp(1l);
        for (long j = 0; j <= nb; ++j) {
          vb[static_cast<std::size_t>(j)] =
              row[static_cast<std::size_t>(j)] * tp;
          tp *= t;
        }
      }
      Real acc(0l);
      {
        Real c0(0l);
        for (long j = 1; j <= std::min(nb, Ng); ++j)
          c0 +=
              vb[static_cast<std::size_t>(j)] * vg[static_cast<std::size_t>(j)];
        acc = Real(2l) * c0 * (Real(ExactRational(1, 2)) - x0);
      }
      if (cut && !x0.is_zero()) {
        Real sd = s1, cd = c1;
        Real tpow = t;  // t^d
        Real drop = rawbmax[static_cast<std::size_t>(m)] * rawgmax /
                    ((Real(1l) - t * t) * (Real(1l) - t) * pi);
        for (long d = 1; d <= nb + Ng; ++d) {
          if (d > 1) {
            Real ns = sd * c1 + cd * s1;
            Real nc = cd * c1 - sd * s1;
            sd = ns;
            cd = nc;
            tpow *= t;
          }
          if (drop * tpow < tol_d) break;  // certified geometric remainder
          Real corr(0l);
          for (long j = 1; j <= Ng && j + d <= nb; ++j)
            corr += vb[static_cast<std::size_t>(j + d)] *
                    vg[static_cast<std::size_t>(j)];
          for (long j = std::max(1l, d); j <= Ng && j - d <= nb; ++j)
            corr += vb[static_cast<std::size_t>(j - d)] *
                    vg[static_cast<std::size_t>(j)];
          if (!corr.is_zero()) acc -= corr * sd / (pi * Real(d));
        }
      }
      total += acc * pow(y, k - 2 - m) * pow(four_pi, -m);
    }
    return total;
  };

  Real sqrt3h = sqrt(Real(3l)) / Real(2l);
  Real cell = tanh_sinh(cell_integrand, sqrt3h, Real(1l), eps) +
              tanh_sinh(cell_integrand, Real(1l), Real(2l), eps);

  {
    // certificate that the stored truncations exhaust the cell integrand:
    // both series are bounded by audited polynomials times t^j, and the
    // worst height is the bottom of the cell
    Real t0 = exp(-two_pi * sqrt3h);
    Real ratio_b = t0 * pow(Real(Nb + 2) / Real(Nb + 1), mu_b);
    Real ratio_g = t0 * pow(Real(Ng + 2) / Real(Ng + 1), mu_g);
    if (!(ratio_b < Real(1l)) || !(ratio_g < Real(1l)))
      throw std::runtime_error("pairing_sl2z: cell series not contracting");
    Real tail_b =
        cb * pow(Real(Nb + 1), mu_b) * pow(t0, Nb + 1) / (Real(1l) - ratio_b);
    Real tail_g =
        pow(Real(Ng + 1), mu_g) * pow(t0, Ng + 1) / (Real(1l) - ratio_g);
    Real full_b(0l), full_g(0l);
    {
      Real tp = t0;
      for (long j = 1; j <= std::max(Nb, Ng); ++j) {
        if (j <= Nb) full_b += cb * pow(Real(j), mu_b) * tp;
        if (j <= Ng) full_g += pow(Real(j), mu_g) * tp;
        tp *= t0;
      }
    }
    Real rawbmax_all(0l);
    for (const Real& v : rawbmax)
      if (v > rawbmax_all) rawbmax_all = v;
    full_b += rawbmax_all;  // the depth parts may carry constant terms
    Real density = tail_b * full_g + full_b * tail_g + tail_b * tail_g;
    Real rem = density * Real(4l) * pow(Real(2l), k - 2) * Real(depth + 1);
    if (!(rem <= eps))
      throw std::runtime_error("pairing_sl2z: cell remainder exceeds target");
  }

  return BigComplex(Real(3l) / pi * (cell + tail));
}

BigComplex pairing_sl2z(const Eigenform& g, const NearlyHolomorphicForm& n) {
  return pairing_sl2z(g, n, Real(1e-24));
}

// ---------------------------------------------------------------------------
// Pairing over the level-four group

BigComplex petersson_gamma04(const PlusSpaceForm& h1, const PlusSpaceForm& h2,
                             const Real& eps) {
  if (h1.kappa() != h2.kappa())
    throw std::invalid_argument("petersson_gamma04: weight mismatch");
  if (!h1.is_cuspidal() || !h2.is_cuspidal())
    throw std::domain_error("petersson_gamma04: cusp forms required");

  ComponentWalker w1 = make_walker(h1);
  bool same = h1.coefficients() == h2.coefficients();
  ComponentWalker w2 = same ? w1 : make_walker(h2);

  const Real s = Real(2 * h1.kappa() + 1) / Real(2l);
  struct Coset {
    long a, b, c, d;
  };
  // bottom rows cover the projective line mod 4
  const Coset cosets[6] = {{1, 0, 0, 1}, {0, -1, 1, 0}, {0, -1, 1, 1},
                           {0, -1, 1, 2}, {0, -1, 1, 3}, {1, 0, 2, 1}};

  // sum over the coset translates of h1 conj(h2) Im^s, a function invariant
  // under the full modular group
  auto phi = [&](const Real& x, const Real& y) -> BigComplex {
    BigComplex tau(x, y);
    BigComplex out(0l);
    for (const Coset& gm : cosets) {
      BigComplex den = BigComplex(gm.c) * tau + BigComplex(gm.d);
      BigComplex wpt = (BigComplex(gm.a) * tau + BigComplex(gm.b)) / den;
      BigComplex v1 = w1.eval_plus(wpt);
      BigComplex v2 = same ? v1 : w2.eval_plus(wpt);
      out += v1 * conj(v2) * BigComplex(pow(wpt.im, s));
    }
    return out;
  };

  // x-integral over the slice of the standard fundamental domain at height y
  // (two strips where the unit circle bites into it), divided by y^2
  auto slice = [&](const Real& y, bool imag_part) -> Real {
    auto f = [&](const Real& x) -> Real {
      BigComplex v = phi(x, y);
      return imag_part ? v.im : v.re;
    };
    Real half(ExactRational(1, 2));
    Real total(0l);
    if (y < Real(1l)) {
      Real x0 = sqrt((Real(1l) - y) * (Real(1l) + y));
      if (x0 < half)
        total = tanh_sinh(f, x0, half, eps) + tanh_sinh(f, -half, -x0, eps);
    } else {
      total = tanh_sinh(f, -half, half, eps);
    }
    return total / (y * y);
  };

  auto integrate = [&](bool imag_part) -> Real {
    auto f = [&](const Real& y) { return slice(y, imag_part); };
    Real sqrt3h = sqrt(Real(3l)) / Real(2l);
    Real total = tanh_sinh(f, sqrt3h, Real(1l), eps) +
                 tanh_sinh(f, Real(1l), Real(2l), eps) +
                 tanh_sinh(f, Real(2l), Real(5l), eps) +
                 tanh_sinh(f, Real(5l), Real(10l), eps) +
                 tanh_sinh(f, Real(10l), Real(20l), eps);
    // the slice decays exponentially in y; certify the cutoff with the
    // observed step-two ratio
    Real s18 = abs(f(Real(18l)));
    Real s20 = abs(f(Real(20l)));
    Real scale = max(abs(total), Real(1l));
    if (!(s20 <= eps * scale) || !(s18 <= eps * scale)) {
      Real ratio = s20 / s18;
      if (!(ratio < Real(ExactRational(9, 10))))
        throw std::runtime_error("petersson_gamma04: slow decay at cutoff");
      Real rem = s20 * Real(2l) / (Real(1l) - ratio);
      if (!(rem <= eps * scale))
        throw std::runtime_error("petersson_gamma04: tail exceeds target");
    }
    return total;
  };

  Real re = integrate(false);
  Real im = same ? Real(0l) : integrate(true);
  Real vol = Real(2l) * const_pi();
  return BigComplex(re / vol, im / vol);
}

BigComplex petersson_gamma04(const PlusSpaceForm& h1,
                             const PlusSpaceForm& h2) {
  return petersson_gamma04(h1, h2, Real(1e-10));
}

}  // namespace symsix
