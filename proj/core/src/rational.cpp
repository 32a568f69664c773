#include <string>

#include "apery/errors.hpp"
#include "apery/real.hpp"

namespace apery {

BigRational make_rational(const BigInt& num, const BigInt& den) {
  if (den == 0) throw DomainError("zero denominator");
  BigRational q(num, den);
  q.canonicalize();
  return q;
}

BigRational parse_rational(std::string_view text) {
  std::string s(text);
  auto b = s.find_first_not_of(" \t\r\n");
  auto e = s.find_last_not_of(" \t\r\n");
  if (b == std::string::npos) throw UsageError("empty rational");
  s = s.substr(b, e - b + 1);
  auto slash = s.find('/');
  auto integer = [&](const std::string& part) {
    BigInt z;
    std::string p = part;
    if (!p.empty() && p[0] == '+') p.erase(0, 1);
    if (p.empty() || z.set_str(p, 10) != 0) throw UsageError("malformed rational: " + s);
    return z;
  };
  if (slash == std::string::npos) return BigRational(integer(s));
  BigInt den = integer(s.substr(slash + 1));
  if (den == 0) throw UsageError("zero denominator in " + s);
  return make_rational(integer(s.substr(0, slash)), den);
}

std::string rational_str(const BigRational& q) {
  if (q.get_den() == 1) return q.get_num().get_str();
  return q.get_num().get_str() + "/" + q.get_den().get_str();
}

}  // namespace apery
