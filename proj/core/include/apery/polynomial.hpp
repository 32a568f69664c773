#pragma once

#include <string>
#include <vector>

#include "apery/real.hpp"

namespace apery {

/// Integer polynomial in n, coefficients low to high. The zero polynomial
/// is the empty vector; otherwise the top coefficient is nonzero.
class IntPoly {
 public:
  IntPoly() = default;
  explicit IntPoly(std::vector<BigInt> coeffs);

  const std::vector<BigInt>& coeffs() const noexcept { return c_; }
  bool is_zero() const noexcept { return c_.empty(); }
  /// -1 for the zero polynomial.
  int degree() const noexcept { return static_cast<int>(c_.size()) - 1; }
  /// Coefficient of n^k (zero beyond the degree).
  BigInt coeff(std::size_t k) const { return k < c_.size() ? c_[k] : BigInt(0); }

  BigInt operator()(long n) const;
  BigInt operator()(const BigInt& n) const;
  Real operator()(const Real& n) const;

  BigInt content() const;
  BigInt height() const;

  /// Human form such as "-n^2-2*n-1".
  std::string str(const std::string& var = "n") const;

  friend bool operator==(const IntPoly&, const IntPoly&) = default;
  friend IntPoly operator*(const IntPoly& a, const IntPoly& b);
  friend IntPoly operator+(const IntPoly& a, const IntPoly& b);
  friend IntPoly operator*(const IntPoly& a, const BigInt& k);

  /// p(n + s).
  IntPoly shifted(long s) const;

 private:
  void trim();
  std::vector<BigInt> c_;
};

}  // namespace apery
