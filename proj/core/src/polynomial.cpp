#include "apery/polynomial.hpp"

#include <algorithm>

namespace apery {

IntPoly::IntPoly(std::vector<BigInt> coeffs) : c_(std::move(coeffs)) { trim(); }

void IntPoly::trim() {
  while (!c_.empty() && c_.back() == 0) c_.pop_back();
}

BigInt IntPoly::operator()(long n) const { return (*this)(BigInt(n)); }

BigInt IntPoly::operator()(const BigInt& n) const {
  BigInt acc = 0;
  for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * n + *it;
  return acc;
}

Real IntPoly::operator()(const Real& n) const {
  Real acc(n.digits());
  for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * n + Real(*it, n.digits());
  return acc;
}

BigInt IntPoly::content() const {
  BigInt g = 0;
  for (auto& c : c_) mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), c.get_mpz_t());
  return g;
}

BigInt IntPoly::height() const {
  BigInt h = 0;
  for (auto& c : c_) h = std::max<BigInt>(h, ::abs(c));
  return h;
}

std::string IntPoly::str(const std::string& var) const {
  if (c_.empty()) return "0";
  std::string out;
  for (int k = degree(); k >= 0; --k) {
    const BigInt& c = c_[k];
    if (c == 0) continue;
    BigInt mag = ::abs(c);
    if (c < 0)
      out += "-";
    else if (!out.empty())
      out += "+";
    bool unit = (mag == 1 && k > 0);
    if (!unit) out += mag.get_str();
    if (k > 0) {
      if (!unit) out += "*";
      out += var;
      if (k > 1) out += "^" + std::to_string(k);
    }
  }
  return out;
}

IntPoly operator*(const IntPoly& a, const IntPoly& b) {
  if (a.is_zero() || b.is_zero()) return {};
  std::vector<BigInt> c(a.c_.size() + b.c_.size() - 1, BigInt(0));
  for (std::size_t i = 0; i < a.c_.size(); ++i)
    for (std::size_t j = 0; j < b.c_.size(); ++j) c[i + j] += a.c_[i] * b.c_[j];
  return IntPoly(std::move(c));
}

IntPoly operator+(const IntPoly& a, const IntPoly& b) {
  std::vector<BigInt> c(std::max(a.c_.size(), b.c_.size()), BigInt(0));
  for (std::size_t i = 0; i < a.c_.size(); ++i) c[i] += a.c_[i];
  for (std::size_t i = 0; i < b.c_.size(); ++i) c[i] += b.c_[i];
  return IntPoly(std::move(c));
}

IntPoly operator*(const IntPoly& a, const BigInt& k) {
  std::vector<BigInt> c = a.c_;
  for (auto& x : c) x *= k;
  return IntPoly(std::move(c));
}

IntPoly IntPoly::shifted(long s) const {
  // Horner in the polynomial ring: p(n+s) = (...(c_d (n+s) + c_{d-1})(n+s) ...).
  IntPoly lin(std::vector<BigInt>{BigInt(s), BigInt(1)});
  IntPoly acc;
  for (auto it = c_.rbegin(); it != c_.rend(); ++it)
    acc = acc * lin + IntPoly(std::vector<BigInt>{*it});
  return acc;
}

}  // namespace apery
