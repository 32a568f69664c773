#include "apery/real.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <string>

#include "apery/errors.hpp"

namespace apery {

mpfr_prec_t bits_for_digits(int digits) {
  if (digits < 1) throw UsageError("precision must be a positive number of digits");
  return static_cast<mpfr_prec_t>(std::ceil(digits * 3.3219280948873623)) + 8;
}

Real::Real(int digits) : digits_(digits) {
  mpfr_init2(v_, bits_for_digits(digits));
  mpfr_set_zero(v_, 1);
}

Real::Real(long value, int digits) : Real(digits) { mpfr_set_si(v_, value, MPFR_RNDN); }

Real::Real(const BigInt& value, int digits) : Real(digits) {
  mpfr_set_z(v_, value.get_mpz_t(), MPFR_RNDN);
}

Real::Real(const BigRational& value, int digits) : Real(digits) {
  mpfr_set_q(v_, value.get_mpq_t(), MPFR_RNDN);
}

Real::Real(double value, int digits) : Real(digits) { mpfr_set_d(v_, value, MPFR_RNDN); }

Real Real::parse(std::string_view text, int digits) {
  Real r(digits);
  std::string s(text);
  // Trim surrounding whitespace; mpfr rejects it at the end.
  auto b = s.find_first_not_of(" \t\r\n");
  auto e = s.find_last_not_of(" \t\r\n");
  if (b == std::string::npos) throw UsageError("empty number");
  s = s.substr(b, e - b + 1);
  if (s.find('/') != std::string::npos) return Real(parse_rational(s), digits);
  char* end = nullptr;
  mpfr_strtofr(r.v_, s.c_str(), &end, 10, MPFR_RNDN);
  if (end == s.c_str() || *end != '\0') throw UsageError("malformed number: " + s);
  return r;
}

Real::Real(const Real& other) : digits_(other.digits_) {
  mpfr_init2(v_, mpfr_get_prec(other.v_));
  mpfr_set(v_, other.v_, MPFR_RNDN);
}

Real::Real(Real&& other) noexcept : digits_(other.digits_) {
  // mpfr_t is a one-element array; swapping the struct moves the limbs.
  mpfr_init2(v_, MPFR_PREC_MIN);
  mpfr_swap(v_, other.v_);
}

Real& Real::operator=(const Real& other) {
  if (this != &other) {
    mpfr_set_prec(v_, mpfr_get_prec(other.v_));
    mpfr_set(v_, other.v_, MPFR_RNDN);
    digits_ = other.digits_;
  }
  return *this;
}

Real& Real::operator=(Real&& other) noexcept {
  if (this != &other) {
    mpfr_swap(v_, other.v_);
    std::swap(digits_, other.digits_);
  }
  return *this;
}

Real::~Real() { mpfr_clear(v_); }

Real Real::with_digits(int digits) const {
  Real r(digits);
  mpfr_set(r.v_, v_, MPFR_RNDN);
  return r;
}

double Real::log_abs() const {
  if (is_zero()) return -INFINITY;
  long e = 0;
  double m = mpfr_get_d_2exp(&e, v_, MPFR_RNDN);
  return std::log(std::fabs(m)) + static_cast<double>(e) * 0.69314718055994531;
}

std::string Real::str(int digits) const {
  if (digits <= 0) digits = digits_;
  if (mpfr_nan_p(v_)) return "nan";
  if (mpfr_inf_p(v_)) return mpfr_sgn(v_) > 0 ? "inf" : "-inf";
  if (is_zero()) return "0";
  char* buf = nullptr;
  mpfr_asprintf(&buf, "%.*Re", digits - 1, v_);
  std::string out(buf);
  mpfr_free_str(buf);
  return out;
}

std::string Real::exact_str() const {
  if (!is_finite() || is_zero()) return str();
  return str(static_cast<int>(mpfr_get_str_ndigits(10, bits())));
}

BigInt Real::round() const {
  if (!is_finite()) throw DomainError("cannot round a non-finite value");
  BigInt z;
  mpfr_get_z(z.get_mpz_t(), v_, MPFR_RNDN);
  return z;
}

BigInt Real::floor() const {
  if (!is_finite()) throw DomainError("cannot floor a non-finite value");
  BigInt z;
  mpfr_get_z(z.get_mpz_t(), v_, MPFR_RNDD);
  return z;
}

namespace {

Real binary(const Real& a, const Real& b,
            int (*op)(mpfr_ptr, mpfr_srcptr, mpfr_srcptr, mpfr_rnd_t)) {
  Real r(std::min(a.digits(), b.digits()));
  op(r.get(), a.get(), b.get(), MPFR_RNDN);
  return r;
}

}  // namespace

Real& Real::operator+=(const Real& o) { return *this = *this + o; }
Real& Real::operator-=(const Real& o) { return *this = *this - o; }
Real& Real::operator*=(const Real& o) { return *this = *this * o; }
Real& Real::operator/=(const Real& o) { return *this = *this / o; }
Real& Real::operator*=(long o) {
  mpfr_mul_si(v_, v_, o, MPFR_RNDN);
  return *this;
}
Real& Real::operator/=(long o) {
  mpfr_div_si(v_, v_, o, MPFR_RNDN);
  return *this;
}

Real Real::operator-() const {
  Real r(*this);
  mpfr_neg(r.v_, r.v_, MPFR_RNDN);
  return r;
}

Real operator+(const Real& a, const Real& b) { return binary(a, b, mpfr_add); }
Real operator-(const Real& a, const Real& b) { return binary(a, b, mpfr_sub); }
Real operator*(const Real& a, const Real& b) { return binary(a, b, mpfr_mul); }
Real operator/(const Real& a, const Real& b) { return binary(a, b, mpfr_div); }

Real operator*(const Real& a, long b) {
  Real r(a);
  r *= b;
  return r;
}
Real operator/(const Real& a, long b) {
  Real r(a);
  r /= b;
  return r;
}
Real operator+(const Real& a, long b) {
  Real r(a);
  mpfr_add_si(r.get(), r.get(), b, MPFR_RNDN);
  return r;
}
Real operator-(const Real& a, long b) {
  Real r(a);
  mpfr_sub_si(r.get(), r.get(), b, MPFR_RNDN);
  return r;
}
Real operator*(const Real& a, const BigInt& b) {
  Real r(a);
  mpfr_mul_z(r.get(), r.get(), b.get_mpz_t(), MPFR_RNDN);
  return r;
}
Real operator*(const Real& a, const BigRational& b) {
  Real r(a);
  mpfr_mul_q(r.get(), r.get(), b.get_mpq_t(), MPFR_RNDN);
  return r;
}
Real operator+(const Real& a, const BigRational& b) {
  Real r(a);
  mpfr_add_q(r.get(), r.get(), b.get_mpq_t(), MPFR_RNDN);
  return r;
}
Real operator-(const Real& a, const BigRational& b) {
  Real r(a);
  mpfr_sub_q(r.get(), r.get(), b.get_mpq_t(), MPFR_RNDN);
  return r;
}

std::partial_ordering operator<=>(const Real& a, const Real& b) {
  if (mpfr_unordered_p(a.v_, b.v_)) return std::partial_ordering::unordered;
  int c = mpfr_cmp(a.v_, b.v_);
  if (c < 0) return std::partial_ordering::less;
  if (c > 0) return std::partial_ordering::greater;
  return std::partial_ordering::equivalent;
}

std::ostream& operator<<(std::ostream& os, const Real& x) { return os << x.str(); }

namespace {

Real unary(const Real& x, int (*op)(mpfr_ptr, mpfr_srcptr, mpfr_rnd_t)) {
  Real r(x.digits());
  op(r.get(), x.get(), MPFR_RNDN);
  return r;
}

}  // namespace

Real abs(const Real& x) { return unary(x, mpfr_abs); }

Real sqrt(const Real& x) {
  if (x.sign() < 0) throw DomainError("sqrt of a negative number");
  return unary(x, mpfr_sqrt);
}

Real log(const Real& x) {
  if (x.sign() <= 0) throw DomainError("log of a non-positive number");
  return unary(x, mpfr_log);
}

Real exp(const Real& x) { return unary(x, mpfr_exp); }

Real pow(const Real& x, const Real& y) { return binary(x, y, mpfr_pow); }

Real pow(const Real& x, long k) {
  Real r(x.digits());
  mpfr_pow_si(r.get(), x.get(), k, MPFR_RNDN);
  return r;
}

Real min(const Real& a, const Real& b) { return binary(a, b, mpfr_min); }
Real max(const Real& a, const Real& b) { return binary(a, b, mpfr_max); }

bool agree_to(const Real& a, const Real& b, int digits) {
  Real scale = max(max(abs(a), abs(b)), Real(1L, a.digits()));
  Real diff = abs(a - b);
  Real tol = pow(Real(10L, std::min(a.digits(), b.digits())), -static_cast<long>(digits));
  return diff <= tol * scale;
}

double agreeing_digits(const Real& a, const Real& b) {
  Real diff = abs(a - b);
  int cap = std::min(a.digits(), b.digits());
  if (diff.is_zero()) return cap;
  double scale = std::max(a.log_abs(), b.log_abs());
  double d = (scale - diff.log_abs()) / 2.302585092994046;
  return std::min<double>(d, cap);
}

namespace {

Real constant(int digits, int (*op)(mpfr_ptr, mpfr_rnd_t)) {
  Real r(digits);
  op(r.get(), MPFR_RNDN);
  return r;
}

}  // namespace

Real pi(int digits) { return constant(digits, mpfr_const_pi); }
Real log2_const(int digits) { return constant(digits, mpfr_const_log2); }
Real euler_gamma(int digits) { return constant(digits, mpfr_const_euler); }
Real catalan_const(int digits) { return constant(digits, mpfr_const_catalan); }

Real zeta3(int digits) {
  Real r(digits);
  mpfr_zeta_ui(r.get(), 3, MPFR_RNDN);
  return r;
}

}  // namespace apery
