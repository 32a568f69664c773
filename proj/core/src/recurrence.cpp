#include "apery/recurrence.hpp"

#include <algorithm>

#include "apery/errors.hpp"
#include "apery/lattice.hpp"

namespace apery {

PolyRecurrence::PolyRecurrence(std::vector<IntPoly> coeffs) : p_(std::move(coeffs)) {
  if (p_.size() < 2) throw UsageError("a recurrence needs at least two coefficient polynomials");
  if (p_.back().is_zero()) throw UsageError("leading recurrence coefficient is zero");
  BigInt g = 0;
  for (auto& p : p_) {
    BigInt c = p.content();
    mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), c.get_mpz_t());
  }
  const auto& lead = p_.back().coeffs().back();
  if (lead < 0) g = -g;
  if (g != 1)
    for (auto& p : p_) {
      std::vector<BigInt> c = p.coeffs();
      for (auto& x : c) mpz_divexact(x.get_mpz_t(), x.get_mpz_t(), g.get_mpz_t());
      p = IntPoly(std::move(c));
    }
}

int PolyRecurrence::degree() const noexcept {
  int d = -1;
  for (auto& p : p_) d = std::max(d, p.degree());
  return d;
}

BigInt PolyRecurrence::height() const {
  BigInt h = 0;
  for (auto& p : p_) h = std::max(h, p.height());
  return h;
}

BigRational PolyRecurrence::residual(const std::vector<BigRational>& x, long n) const {
  BigRational s = 0;
  for (std::size_t j = 0; j < p_.size(); ++j) s += BigRational(p_[j](n)) * x[n + j];
  return s;
}

Real PolyRecurrence::residual(const std::vector<Real>& x, long n) const {
  Real s(x[n].digits());
  for (std::size_t j = 0; j < p_.size(); ++j) s += x[n + j] * p_[j](n);
  return s;
}

PolyRecurrence PolyRecurrence::shifted(long s) const {
  std::vector<IntPoly> q;
  for (auto& p : p_) q.push_back(p.shifted(s));
  return PolyRecurrence(std::move(q));
}

std::string PolyRecurrence::str() const {
  std::string out;
  for (std::size_t j = 0; j < p_.size(); ++j) {
    if (p_[j].is_zero()) continue;
    if (!out.empty()) out += " + ";
    std::string x = j == 0 ? "X(n)" : "X(n+" + std::to_string(j) + ")";
    out += "(" + p_[j].str() + ")*" + x;
  }
  return out + " = 0";
}

std::vector<BigRational> iterate(const PolyRecurrence& rec, const std::vector<BigRational>& init,
                                 unsigned count) {
  const unsigned L = rec.order();
  if (init.size() != L)
    throw UsageError("iterate needs " + std::to_string(L) + " initial values");
  std::vector<BigRational> x(init);
  x.reserve(count + 1);
  std::vector<BigInt> pv(L + 1);
  // Work with a common denominator per step: sum_{j<L} p_j(n) x_{n+j}.
  for (long n = 0; x.size() <= count; ++n) {
    for (unsigned j = 0; j <= L; ++j) pv[j] = rec[j](n);
    if (pv[L] == 0)
      throw SingularRecurrenceError(
          "leading coefficient vanishes at n = " + std::to_string(n), n);
    BigRational s = 0;
    for (unsigned j = 0; j < L; ++j)
      if (pv[j] != 0) s += BigRational(pv[j]) * x[n + j];
    s /= BigRational(-pv[L]);
    x.push_back(std::move(s));
  }
  x.resize(std::min<std::size_t>(x.size(), count + 1));
  return x;
}

std::vector<Real> iterate_backward(const PolyRecurrence& rec, const Real& x_top,
                                   const Real& x_top1, unsigned top) {
  if (rec.order() != 2) throw UsageError("backward iteration is implemented for order 2");
  std::vector<Real> x(top + 2, Real(std::min(x_top.digits(), x_top1.digits())));
  x[top] = x_top;
  x[top + 1] = x_top1;
  for (long n = static_cast<long>(top) - 1; n >= 0; --n) {
    BigInt p0 = rec[0](n);
    if (p0 == 0)
      throw SingularRecurrenceError("trailing coefficient vanishes at n = " + std::to_string(n), n);
    Real s = x[n + 1] * rec[1](n) + x[n + 2] * rec[2](n);
    x[n] = -s / Real(p0, s.digits());
  }
  return x;
}

Real CharRoot::modulus() const { return sqrt(re * re + im * im); }

Growth char_growth(const PolyRecurrence& rec, int digits) {
  if (rec.order() != 2) throw UsageError("char_growth needs an order-2 recurrence");
  const int d = rec.degree();
  Real c0(rec[0].coeff(d), digits), c1(rec[1].coeff(d), digits), c2(rec[2].coeff(d), digits);
  if (c2.is_zero())
    throw DegenerateAsymptoticsError("p_2 has lower degree than the recurrence; no Poincare limit");
  if (c0.is_zero())
    throw DegenerateAsymptoticsError("zero characteristic root; recessive growth undefined");
  // c2 L^2 + c1 L + c0 = 0.
  Real disc = c1 * c1 - c2 * c0 * 4L;
  Growth g{Real(digits), Real(digits), {}};
  if (disc.sign() <= 0)
    throw DegenerateAsymptoticsError("characteristic roots have equal modulus");
  Real s = sqrt(disc);
  CharRoot r1{(-c1 + s) / (c2 * 2L), Real(digits)};
  CharRoot r2{(-c1 - s) / (c2 * 2L), Real(digits)};
  Real m1 = abs(r1.re), m2 = abs(r2.re);
  if (!(m1 != m2) || agree_to(m1, m2, digits - 5))
    throw DegenerateAsymptoticsError("characteristic roots have equal modulus");
  if (m1 < m2) std::swap(r1, r2), std::swap(m1, m2);
  g.alpha = m1;
  g.beta = Real(1L, digits) / m2;
  g.roots = {r1, r2};
  return g;
}

std::optional<std::array<BigInt, 3>> find_initial_relation(const Real& I0, const Real& I1,
                                                           int digits, const BigInt& height_bound) {
  const int have = std::min(I0.digits(), I1.digits());
  // The confirmation pass sits 40 digits above the search.
  const int search = std::min(digits, have - 40);
  if (search < 20) throw UsageError("initial values carry too few digits for a relation search");
  for (auto& rel : integer_relations({I0, I1, Real(1L, have)}, search, height_bound)) {
    auto r = rel.coefficients;
    if (r[1] == 0) continue;
    if (r[1] < 0)
      for (auto& c : r) c = -c;
    return std::array<BigInt, 3>{r[0], r[1], -r[2]};
  }
  return std::nullopt;
}

ApproxSequences make_sequences(const PolyRecurrence& rec, const std::array<BigInt, 3>& rel,
                               unsigned terms, int digits) {
  if (rec.order() != 2) throw UsageError("approximation sequences need an order-2 recurrence");
  if (rel[1] == 0) throw UsageError("initial relation needs c1 != 0");
  BigRational b1 = make_rational(-rel[0], rel[1]);
  BigRational a1 = make_rational(-rel[2], rel[1]);
  ApproxSequences s{rec, iterate(rec, {BigRational(0), a1}, terms),
                    iterate(rec, {BigRational(1), b1}, terms), rel, Real(digits)};
  const BigRational& bn = s.b.back();
  if (bn == 0) throw DataError("b_n vanished at the last index");
  s.constant_value = Real(BigRational(s.a.back() / bn), digits);
  return s;
}

}  // namespace apery
