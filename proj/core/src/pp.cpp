#include <numeric>

#include "apery/certificate.hpp"
#include "apery/errors.hpp"
#include "apery/primes.hpp"
#include "apery/special.hpp"

namespace apery {

void PpSpec::validate() const {
  if (!(0 <= e1 && e1 < e2 && e2 <= 1)) throw UsageError("Pp needs 0 <= e1 < e2 <= 1");
  if (!(0 <= e3 && e3 < e4)) throw UsageError("Pp needs 0 <= e3 < e4");
  if (modulus < 1) throw UsageError("Pp modulus must be positive");
  if (residues.empty()) throw UsageError("Pp residue set is empty");
  for (auto r : residues)
    if (r >= modulus) throw UsageError("Pp residue out of range");
}

std::string PpSpec::str() const {
  std::string r;
  for (auto c : residues) r += (r.empty() ? "" : ",") + std::to_string(c);
  return "Pp(" + rational_str(e1) + "," + rational_str(e2) + "," + rational_str(e3) + "," +
         rational_str(e4) + ",{" + r + "}," + std::to_string(modulus) + ")";
}

BigInt pp_product(const PpSpec& spec, unsigned long n) {
  spec.validate();
  if (n < 1) throw UsageError("pp_product needs n >= 1");
  // p < e4 n bounds the sieve; p/n > e3 the bottom.
  BigRational top_q = spec.e4 * n;
  BigInt top = top_q.get_num() / top_q.get_den();
  BigInt result = 1;
  if (top < 2) return result;
  const BigInt nn(n);
  for (auto p : primes_in(1, top.get_ui())) {
    const BigInt P(p);
    // e3 < p/n < e4
    if (!(BigRational(P, nn) > spec.e3 && BigRational(P, nn) < spec.e4)) continue;
    // e1 < {n/p} < e2, compared exactly as (n mod p)/p
    BigRational frac(BigInt(n % p), P);
    frac.canonicalize();
    if (!(frac > spec.e1 && frac < spec.e2)) continue;
    bool ok = false;
    for (auto c : spec.residues) ok = ok || p % spec.modulus == c;
    if (ok) result *= P;
  }
  return result;
}

Real pp_growth_exact(const PpSpec& spec, int digits) {
  spec.validate();
  unsigned long coprime = 0;
  for (auto c : spec.residues)
    if (std::gcd(c, spec.modulus) == 1) ++coprime;
  unsigned long phi = 0;
  for (unsigned long r = 0; r < spec.modulus; ++r)
    if (std::gcd(r, spec.modulus) == 1) ++phi;
  if (spec.modulus == 1) coprime = phi = 1;  // every prime is 0 mod 1
  const BigRational density(coprime, phi);
  if (coprime == 0) return Real(0L, digits);

  // Window k holds the primes with n/(k+e2) < p < n/(k+e1); in p/n they are
  // (1/(k+e2), 1/(k+e1)). Windows shrink towards 0 as k grows.
  BigRational length = 0;
  for (unsigned long k = 0;; ++k) {
    BigRational lo = 1 / BigRational(k + spec.e2);
    bool open_top = k == 0 && spec.e1 == 0;
    BigRational hi = open_top ? spec.e4 : 1 / BigRational(k + spec.e1);
    if (hi <= spec.e3) break;
    if (spec.e3 == 0 && hi <= spec.e4) {
      // Every remaining window is unclipped: sum of 1/(j+e1) - 1/(j+e2), j >= k.
      if (spec.e2 - spec.e1 == 1) {
        length += hi;  // telescopes to 1/(k+e1)
        return Real(density * length, digits);
      }
      Real tail = digamma(k + spec.e2, digits + 10) - digamma(k + spec.e1, digits + 10);
      return (Real(length, digits + 10) + tail).with_digits(digits) * density;
    }
    BigRational a = std::max(lo, spec.e3), b = std::min(hi, spec.e4);
    if (a < b) length += b - a;
  }
  return Real(density * length, digits);
}

}  // namespace apery
