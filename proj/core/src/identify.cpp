#include <algorithm>
#include <cmath>
#include <mutex>

#include "apery/errors.hpp"
#include "apery/lattice.hpp"

namespace apery {

namespace {

Real k_log2(int d) { return log2_const(d); }
Real k_log3(int d) { return log(Real(3L, d)); }
Real k_pi(int d) { return pi(d); }
Real k_pi2(int d) { return pi(d) * pi(d); }
Real k_pisqrt3(int d) { return pi(d) * sqrt(Real(3L, d)); }
Real k_sqrt2(int d) { return sqrt(Real(2L, d)); }
Real k_sqrt3(int d) { return sqrt(Real(3L, d)); }
Real k_sqrt5(int d) { return sqrt(Real(5L, d)); }
Real k_cbrt4(int d) {
  Real r(d);
  mpfr_cbrt(r.get(), Real(4L, d).get(), MPFR_RNDN);
  return r;
}
Real k_catalan(int d) { return catalan_const(d); }
Real k_zeta3(int d) { return zeta3(d); }

BigInt pow10(long e) {
  BigInt z;
  mpz_ui_pow_ui(z.get_mpz_t(), 10, static_cast<unsigned long>(e));
  return z;
}

BigInt vec_gcd(const std::vector<BigInt>& v) {
  BigInt g = 0;
  for (auto& x : v) mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), x.get_mpz_t());
  return g;
}

// Largest s with s^2 | n (trial division; leftover cofactor kept whole).
std::pair<BigInt, BigInt> split_square(BigInt n) {
  BigInt s = 1;
  for (unsigned long p = 2; p < 100000; ++p) {
    BigInt pp = p * p;
    if (pp > n) break;
    while (mpz_divisible_ui_p(n.get_mpz_t(), p * p)) {
      n /= pp;
      s *= p;
    }
  }
  if (mpz_perfect_square_p(n.get_mpz_t())) {
    BigInt r;
    mpz_sqrt(r.get_mpz_t(), n.get_mpz_t());
    s *= r;
    n = 1;
  }
  return {s, n};
}

std::string frac(const BigRational& q) { return rational_str(q); }

// "a + b*k" with the zero parts dropped.
std::string linear_str(const BigRational& a, const BigRational& b, const std::string& k) {
  std::string out;
  if (a != 0) out = frac(a);
  if (b != 0) {
    BigRational mag = ::abs(b);
    std::string term = (mag == 1 ? "" : frac(mag) + "*") + k;
    if (out.empty())
      out = (b < 0 ? "-" : "") + term;
    else
      out += (b < 0 ? " - " : " + ") + term;
  }
  return out.empty() ? "0" : out;
}

std::string poly_str(const std::vector<BigInt>& c) {
  std::string out;
  for (std::size_t i = c.size(); i-- > 0;) {
    if (c[i] == 0) continue;
    BigInt mag = ::abs(c[i]);
    out += c[i] < 0 ? (out.empty() ? "-" : " - ") : (out.empty() ? "" : " + ");
    if (mag != 1 || i == 0) out += mag.get_str();
    if (i > 0) out += (mag != 1 ? "*x" : "x") + (i > 1 ? "^" + std::to_string(i) : "");
  }
  return out + " = 0";
}

}  // namespace

const std::vector<BasisConstant>& default_basis() {
  static const std::vector<BasisConstant> basis = {
      {"log(2)", k_log2},    {"log(3)", k_log3},   {"pi", k_pi},
      {"pi^2", k_pi2},       {"pi*sqrt(3)", k_pisqrt3}, {"sqrt(2)", k_sqrt2},
      {"sqrt(3)", k_sqrt3},  {"sqrt(5)", k_sqrt5}, {"2^(2/3)", k_cbrt4},
      {"Catalan", k_catalan}, {"zeta(3)", k_zeta3},
  };
  return basis;
}

std::string kind_name(Identification::Kind k) {
  switch (k) {
    case Identification::Kind::rational: return "rational";
    case Identification::Kind::algebraic: return "algebraic";
    case Identification::Kind::linear_in_basis: return "linear_in_basis";
    case Identification::Kind::fractional_linear: return "fractional_linear";
  }
  return "?";
}

std::string Identification::str() const {
  switch (kind) {
    case Kind::rational: return frac(rational);
    case Kind::algebraic: {
      if (polynomial.size() == 3) {
        // r2 x^2 + r1 x + r0: x = -r1/(2 r2) +- s/(2 r2) sqrt(D).
        const BigInt &r0 = polynomial[0], &r1 = polynomial[1], &r2 = polynomial[2];
        BigInt disc = r1 * r1 - 4 * r2 * r0;
        if (disc > 0) {
          auto [s, d] = split_square(disc);
          BigRational a = make_rational(-r1, 2 * r2);
          BigRational b = make_rational(s, 2 * r2);
          if (linear[1] < 0) b = -b;  // the branch recorded at identification
          return linear_str(a, b, "sqrt(" + d.get_str() + ")");
        }
      }
      return "root of " + poly_str(polynomial);
    }
    case Kind::linear_in_basis: return linear_str(linear[0], linear[1], basis);
    case Kind::fractional_linear: {
      auto side = [&](const BigInt& a, const BigInt& b) {
        return "(" + linear_str(BigRational(a), BigRational(b), basis) + ")";
      };
      return side(fractional[0], fractional[1]) + "/" + side(fractional[2], fractional[3]);
    }
  }
  return "?";
}

Real Identification::evaluate(int digits, const Real& near) const {
  auto basis_value = [&]() -> Real {
    for (auto& b : default_basis())
      if (b.name == basis) return b.value(digits);
    throw UsageError("unknown basis constant " + basis);
  };
  switch (kind) {
    case Kind::rational: return Real(rational, digits);
    case Kind::linear_in_basis: return Real(linear[0], digits) + basis_value() * linear[1];
    case Kind::fractional_linear: {
      Real k = basis_value();
      return (Real(fractional[0], digits) + k * fractional[1]) /
             (Real(fractional[2], digits) + k * fractional[3]);
    }
    case Kind::algebraic: {
      if (polynomial.size() == 3) {
        BigInt disc = polynomial[1] * polynomial[1] - 4 * polynomial[2] * polynomial[0];
        if (disc >= 0) {
          Real root = sqrt(Real(disc, digits));
          if (linear[1] < 0) root = -root;
          return (root - Real(polynomial[1], digits)) / (Real(polynomial[2], digits) * 2L);
        }
      }
      // Newton from the known approximation.
      Real x = near.with_digits(digits);
      for (int it = 0; it < 200; ++it) {
        Real f(digits), df(digits);
        for (std::size_t i = polynomial.size(); i-- > 0;) {
          df = df * x + f;
          f = f * x + Real(polynomial[i], digits);
        }
        Real step = f / df;
        x -= step;
        if (step.is_zero() || step.log_abs() - x.log_abs() < -(digits + 2) * 2.302585092994046) break;
      }
      return x;
    }
  }
  return Real(digits);
}

std::optional<Identification> identify_constant(const Real& C, int digits,
                                                const IdentifyOptions& opt) {
  if (digits < 60) throw UsageError("identify_constant needs at least 60 digits");
  const int have = C.digits();
  if (have < digits + 40)
    throw UsageError("identify_constant needs the constant at " + std::to_string(digits + 40) +
                     " digits");
  BigInt H = opt.height_bound;
  if (H == 0) H = pow10(digits / 8);

  auto finish = [&](Identification id) {
    id.verification_precision = have;
    Real v = id.evaluate(have, C);
    id.residual = abs(v - C).with_digits(10);
    return id;
  };

  // Rational, then quadratic and cubic algebraic.
  std::vector<Real> powers = {Real(1L, have), C};
  for (unsigned deg = 1; deg <= 3; ++deg) {
    if (deg > 1) powers.push_back(powers.back() * C);
    for (auto& rel : integer_relations(powers, digits, H)) {
      const auto& r = rel.coefficients;
      if (r[deg] == 0) continue;
      std::vector<BigInt> poly = r;
      BigInt g = vec_gcd(poly);
      for (auto& c : poly) c /= g;
      if (poly.back() < 0)
        for (auto& c : poly) c = -c;
      Identification id;
      if (deg == 1) {
        id.kind = Identification::Kind::rational;
        id.rational = make_rational(-poly[0], poly[1]);
      } else {
        id.kind = Identification::Kind::algebraic;
        id.polynomial = poly;
        if (deg == 2) {
          // Record which root C is: sign of (2 r2 C + r1).
          Real branch = C * poly[2] * 2L + Real(poly[1], have);
          id.linear[1] = branch.sign() >= 0 ? 1 : -1;
        }
      }
      return finish(std::move(id));
    }
  }

  // a + b k.
  for (auto& bc : opt.basis) {
    Real k = bc.value(have);
    for (auto& rel : integer_relations({Real(1L, have), k, C}, digits, H)) {
      const auto& r = rel.coefficients;
      if (r[2] == 0 || r[1] == 0) continue;
      Identification id;
      id.kind = Identification::Kind::linear_in_basis;
      id.basis = bc.name;
      id.linear = {make_rational(-r[0], r[2]), make_rational(-r[1], r[2])};
      return finish(std::move(id));
    }
  }

  // (a + b k) / (c + d k).
  for (auto& bc : opt.basis) {
    Real k = bc.value(have);
    for (auto& rel : integer_relations({Real(1L, have), k, C, k * C}, digits, H)) {
      auto r = rel.coefficients;
      if (r[3] == 0) continue;
      BigInt a = -r[0], b = -r[1], c = r[2], d = r[3];
      if (a * d == b * c) continue;
      if (c < 0 || (c == 0 && d < 0)) {
        a = -a, b = -b, c = -c, d = -d;
      }
      Identification id;
      id.kind = Identification::Kind::fractional_linear;
      id.basis = bc.name;
      id.fractional = {a, b, c, d};
      return finish(std::move(id));
    }
  }
  return std::nullopt;
}

std::optional<std::array<BigInt, 4>> equivalent_constants(const Real& C1, const Real& C2,
                                                          int digits, const BigInt& height_bound) {
  const int have = std::min(C1.digits(), C2.digits());
  std::vector<Real> xs = {Real(1L, have), C1.with_digits(have), C2.with_digits(have),
                          C1.with_digits(have) * C2.with_digits(have)};
  for (auto& rel : integer_relations(xs, digits, height_bound)) {
    const auto& r = rel.coefficients;
    BigInt a = -r[0], b = -r[1], c = r[2], d = r[3];
    if (a * d == b * c) continue;  // degenerate, C2 drops out
    if (c < 0 || (c == 0 && d < 0)) {
      a = -a, b = -b, c = -c, d = -d;
    }
    return std::array<BigInt, 4>{a, b, c, d};
  }
  return std::nullopt;
}

}  // namespace apery
