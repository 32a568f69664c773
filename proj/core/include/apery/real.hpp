#pragma once

#include <mpfr.h>

#include <compare>
#include <iosfwd>
#include <string>
#include <string_view>

#include <gmpxx.h>

namespace apery {

using BigInt = mpz_class;
using BigRational = mpq_class;

/// Binary precision used for a decimal working precision.
mpfr_prec_t bits_for_digits(int digits);

/// Multiple-precision real with an explicit decimal precision.
///
/// The precision travels with the value. Binary arithmetic between two
/// `Real`s is carried out at the smaller of the two precisions; mixing with
/// integers or rationals keeps the precision of the `Real` operand.
class Real {
 public:
  explicit Real(int digits = 30);
  Real(long value, int digits);
  Real(const BigInt& value, int digits);
  Real(const BigRational& value, int digits);
  Real(double value, int digits);
  static Real parse(std::string_view text, int digits);

  Real(const Real& other);
  Real(Real&& other) noexcept;
  Real& operator=(const Real& other);
  Real& operator=(Real&& other) noexcept;
  ~Real();

  int digits() const noexcept { return digits_; }
  mpfr_prec_t bits() const noexcept { return mpfr_get_prec(v_); }

  mpfr_srcptr get() const noexcept { return v_; }
  mpfr_ptr get() noexcept { return v_; }

  /// Copy rounded to a different precision.
  Real with_digits(int digits) const;

  bool is_zero() const noexcept { return mpfr_zero_p(v_) != 0; }
  bool is_finite() const noexcept { return mpfr_number_p(v_) != 0; }
  int sign() const noexcept { return mpfr_sgn(v_); }

  double to_double() const noexcept { return mpfr_get_d(v_, MPFR_RNDN); }
  /// Natural log of |x| as a double, valid far outside the double range.
  double log_abs() const;
  /// Scientific notation with `digits` significant digits (default: own).
  std::string str(int digits = 0) const;
  /// Enough digits that parse(exact_str(), digits()) restores every bit.
  std::string exact_str() const;
  /// Nearest integer.
  BigInt round() const;
  BigInt floor() const;

  Real& operator+=(const Real& o);
  Real& operator-=(const Real& o);
  Real& operator*=(const Real& o);
  Real& operator/=(const Real& o);
  Real& operator*=(long o);
  Real& operator/=(long o);

  Real operator-() const;

  friend Real operator+(const Real& a, const Real& b);
  friend Real operator-(const Real& a, const Real& b);
  friend Real operator*(const Real& a, const Real& b);
  friend Real operator/(const Real& a, const Real& b);
  friend Real operator*(const Real& a, long b);
  friend Real operator*(long a, const Real& b) { return b * a; }
  friend Real operator/(const Real& a, long b);
  friend Real operator+(const Real& a, long b);
  friend Real operator-(const Real& a, long b);
  friend Real operator*(const Real& a, const BigInt& b);
  friend Real operator*(const Real& a, const BigRational& b);
  friend Real operator+(const Real& a, const BigRational& b);
  friend Real operator-(const Real& a, const BigRational& b);

  friend bool operator==(const Real& a, const Real& b) { return mpfr_equal_p(a.v_, b.v_) != 0; }
  friend std::partial_ordering operator<=>(const Real& a, const Real& b);
  friend bool operator<(const Real& a, long b) { return mpfr_cmp_si(a.v_, b) < 0; }
  friend bool operator>(const Real& a, long b) { return mpfr_cmp_si(a.v_, b) > 0; }

 private:
  mpfr_t v_;
  int digits_;
};

std::ostream& operator<<(std::ostream& os, const Real& x);

Real abs(const Real& x);
Real sqrt(const Real& x);
Real log(const Real& x);
Real exp(const Real& x);
Real pow(const Real& x, const Real& y);
Real pow(const Real& x, long k);
Real min(const Real& a, const Real& b);
Real max(const Real& a, const Real& b);

/// The pair's precisions must agree to `digits`: |a-b| <= 10^-digits * max(|a|,|b|,1).
bool agree_to(const Real& a, const Real& b, int digits);

/// Number of leading decimal digits on which a and b agree (relative).
double agreeing_digits(const Real& a, const Real& b);

Real pi(int digits);
Real log2_const(int digits);
Real euler_gamma(int digits);
Real catalan_const(int digits);
Real zeta3(int digits);

// Rational helpers.
BigRational make_rational(const BigInt& num, const BigInt& den);
BigRational parse_rational(std::string_view text);
std::string rational_str(const BigRational& q);

}  // namespace apery
