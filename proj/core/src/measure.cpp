#include <cmath>

#include "apery/certificate.hpp"
#include "apery/errors.hpp"

namespace apery {

namespace {

// Least-squares slope of y against x.
long double slope(const std::vector<long double>& x, const std::vector<long double>& y) {
  const auto m = static_cast<long double>(x.size());
  long double sx = 0, sy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) sx += x[i], sy += y[i];
  const long double mx = sx / m, my = sy / m;
  long double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  if (sxx == 0) throw DataError("regression abscissae are all equal");
  return sxy / sxx;
}

double log_abs(const BigInt& z) {
  signed long e;
  double m = mpz_get_d_2exp(&e, z.get_mpz_t());
  return std::log(std::fabs(m)) + static_cast<double>(e) * std::log(2.0);
}

}  // namespace

DeltaMeasure delta_and_measure(const Real& alpha, const Real& beta, const Real& nu) {
  if (!(alpha > 1L) || !(beta > 1L)) throw DomainError("delta needs alpha > 1 and beta > 1");
  if (nu.sign() < 0) throw DomainError("delta needs nu >= 0");
  const int d = std::min({alpha.digits(), beta.digits(), nu.digits()});
  Real den = log(alpha.with_digits(d)) + nu.with_digits(d);
  if (den.is_zero()) throw DomainError("log alpha + nu vanishes");
  DeltaMeasure r{(log(beta.with_digits(d)) - nu.with_digits(d)) / den, std::nullopt};
  if (r.delta.sign() > 0) r.measure = Real(1L, d) + Real(1L, d) / r.delta;
  return r;
}

Real empirical_delta(const Real& C, const std::vector<BigRational>& a,
                     const std::vector<BigRational>& b, const std::vector<BigInt>& E) {
  const std::size_t N = a.size();
  if (N < 500) throw UsageError("empirical_delta needs at least 500 terms");
  if (b.size() != N || E.size() != N) throw UsageError("a, b and E must have the same length");
  const int prec = C.digits();
  const double floor_log = -(prec - 10) * std::log(10.0);
  std::vector<long double> xs, ys;
  for (std::size_t n = N / 2; n < N; ++n) {
    BigRational A = a[n] * E[n], B = b[n] * E[n];
    if (A.get_den() != 1 || B.get_den() != 1)
      throw DataError("E(n) does not clear the denominators at n = " + std::to_string(n));
    BigInt p = A.get_num(), q = B.get_num(), g;
    if (q == 0) throw DataError("b'_n vanishes at n = " + std::to_string(n));
    mpz_gcd(g.get_mpz_t(), p.get_mpz_t(), q.get_mpz_t());
    p /= g;
    q /= g;
    Real err = abs(C - Real(BigRational(p, q), prec));
    if (err.is_zero()) continue;
    double le = err.log_abs();
    if (le < floor_log) continue;  // beyond what C resolves
    xs.push_back(log_abs(q));
    ys.push_back(-le);
  }
  if (xs.size() < 2) throw DataError("too few terms resolved by the precision of C");
  return Real(static_cast<double>(slope(xs, ys) - 1), 30);
}

Real empirical_nu(const std::vector<BigRational>& a, const std::vector<BigRational>& b, int digits) {
  const std::size_t N = a.size();
  if (N < 8 || b.size() != N) throw UsageError("empirical_nu needs matching sequences of >= 8 terms");
  std::vector<long double> xs, ys;
  for (std::size_t n = N - N / 4; n < N; ++n) {
    xs.push_back(static_cast<long double>(n));
    // E(n) = F(n) / gcd of the numerators, so that E a_n and E b_n are
    // coprime integers; shared numerator content (often a prime power)
    // lowers the growth.
    BigInt g;
    mpz_gcd(g.get_mpz_t(), a[n].get_num().get_mpz_t(), b[n].get_num().get_mpz_t());
    double lg = g == 0 ? 0.0 : log_abs(g);
    ys.push_back(log_abs(min_clearing_factor(a[n], b[n])) - lg);
  }
  return Real(static_cast<double>(slope(xs, ys)), digits);
}

std::string verdict_name(IrrationalityCertificate::Verdict v) {
  return v == IrrationalityCertificate::Verdict::irrationality_candidate ? "irrationality-candidate"
                                                                       : "approximation-only";
}

}  // namespace apery
