#include "apery/special.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <vector>

#include "apery/errors.hpp"

namespace apery {

namespace {

std::mutex bernoulli_mutex;
std::vector<BigRational> bernoulli_cache;  // B_0 .. B_{size-1}

// Extends the cache with the classical recurrence
//   sum_{j=0}^{m} C(m+1, j) B_j = 0.
void extend_bernoulli(unsigned upto) {
  if (bernoulli_cache.empty()) bernoulli_cache.push_back(BigRational(1));
  while (bernoulli_cache.size() <= upto) {
    unsigned m = static_cast<unsigned>(bernoulli_cache.size());
    if (m > 1 && m % 2 == 1) {
      bernoulli_cache.push_back(BigRational(0));
      continue;
    }
    BigRational sum = 0;
    BigInt binom = 1;  // C(m+1, j)
    for (unsigned j = 0; j < m; ++j) {
      sum += binom * bernoulli_cache[j];
      binom = binom * (m + 1 - j) / (j + 1);
    }
    BigRational b = -sum / BigRational(binom);
    b.canonicalize();
    bernoulli_cache.push_back(b);
  }
}

}  // namespace

BigRational bernoulli(unsigned k) {
  std::lock_guard lock(bernoulli_mutex);
  extend_bernoulli(k);
  return bernoulli_cache[k];
}

Real digamma(const BigRational& x, int digits) {
  if (x <= 0) throw DomainError("digamma requires a positive argument, got " + rational_str(x));
  if (digits < 1) throw UsageError("digamma precision must be positive");
  const int work = digits + 10;

  // The smallest asymptotic term is about exp(-2 pi x), so x must exceed
  // digits * ln(10) / (2 pi) ~ 0.37 * digits before the series is summed.
  const double need = std::max(10.0, 0.37 * work + 2.0);
  BigRational shift_sum = 0;
  BigRational y = x;
  while (y < need) {
    shift_sum += 1 / y;
    y += 1;
  }

  Real yr(y, work);
  Real result = log(yr) - Real(BigRational(1, 2) / y, work);
  Real y2 = yr * yr;
  Real ypow = y2;  // y^{2k}
  Real eps = pow(Real(10L, work), -static_cast<long>(work));
  Real prev_term(work);
  for (unsigned k = 1;; ++k) {
    BigRational coef = bernoulli(2 * k) / BigRational(2 * k);
    Real term = Real(coef, work) / ypow;
    Real mag = abs(term);
    result -= term;
    if (mag < eps * abs(result)) break;
    if (k > 1 && mag > abs(prev_term)) break;  // series started to diverge
    prev_term = term;
    ypow *= y2;
  }
  result -= Real(shift_sum, work);
  return result.with_digits(digits);
}

Real gamma(const BigRational& x, int digits) {
  if (x <= 0 && x.get_den() == 1) throw DomainError("gamma pole at " + rational_str(x));
  Real r(digits + 5);
  Real xr(x, digits + 5);
  mpfr_gamma(r.get(), xr.get(), MPFR_RNDN);
  return r.with_digits(digits);
}

Real beta(const BigRational& a, const BigRational& b, int digits) {
  if (a <= 0 || b <= 0) throw DomainError("beta requires positive arguments");
  int w = digits + 5;
  Real r = gamma(a, w) * gamma(b, w) / gamma(a + b, w);
  return r.with_digits(digits);
}

}  // namespace apery
