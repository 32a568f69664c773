#include <algorithm>
#include <cmath>

#include "apery/certificate.hpp"
#include "apery/errors.hpp"
#include "apery/primes.hpp"

namespace apery {

namespace {

constexpr std::size_t kTail = 100;
constexpr unsigned kMinObservations = 20;
constexpr unsigned kMaxCells = 12;
constexpr unsigned long kFirstFitIndex = 30;

BigInt power(const BigInt& x, unsigned k) {
  BigInt r;
  mpz_pow_ui(r.get_mpz_t(), x.get_mpz_t(), k);
  return r;
}

bool divides(const BigInt& d, const BigInt& n) { return mpz_divisible_p(n.get_mpz_t(), d.get_mpz_t()) != 0; }

// Number of lcm(1..n) factors needed to absorb F; 0 if some prime of F exceeds n.
std::optional<unsigned> lcm_exponent(BigInt F, const BigInt& lcm) {
  unsigned k = 0;
  while (F != 1) {
    BigInt g;
    mpz_gcd(g.get_mpz_t(), F.get_mpz_t(), lcm.get_mpz_t());
    if (g == 1) return std::nullopt;
    F /= g;
    ++k;
  }
  return k;
}

struct Observation {
  unsigned long n, p;
  unsigned surplus;
};

// Runs of cells that hold surplus >= level at every one of their (enough)
// observations, as Pp specs over {n/p}.
std::vector<PpSpec> full_cells(const std::vector<Observation>& obs, unsigned Q, unsigned level) {
  std::vector<unsigned> count(Q, 0);
  std::vector<bool> ok(Q, true);
  for (auto& o : obs) {
    unsigned long r = o.n % o.p;
    if (r == 0 || (r * Q) % o.p == 0) continue;  // on a cell boundary
    unsigned c = static_cast<unsigned>(r * Q / o.p);
    ++count[c];
    if (o.surplus < level) ok[c] = false;
  }
  std::vector<PpSpec> out;
  for (unsigned c = 0; c < Q;) {
    if (!(ok[c] && count[c] >= kMinObservations)) {
      ++c;
      continue;
    }
    unsigned e = c;
    while (e + 1 < Q && ok[e + 1] && count[e + 1] >= kMinObservations) ++e;
    PpSpec s;
    s.e1 = BigRational(c, Q);
    s.e2 = BigRational(e + 1, Q);
    s.e1.canonicalize();
    s.e2.canonicalize();
    out.push_back(s);
    c = e + 1;
  }
  return out;
}

BigInt factor_with(const std::vector<BigInt>& lcm, unsigned k, const std::vector<PpSpec>& pp,
                   unsigned long n) {
  BigInt E = power(lcm[n], k);
  for (auto& s : pp) {
    BigInt P = pp_product(s, n);
    if (!divides(P, E)) return BigInt(0);
    mpz_divexact(E.get_mpz_t(), E.get_mpz_t(), P.get_mpz_t());
  }
  return E;
}

bool clears(const std::vector<BigInt>& F, const std::vector<BigInt>& lcm, unsigned k,
            const std::vector<PpSpec>& pp, std::size_t from, std::size_t to) {
  for (std::size_t n = std::max<std::size_t>(from, 1); n < to; ++n) {
    BigInt E = factor_with(lcm, k, pp, n);
    if (E == 0 || !divides(F[n], E)) return false;
  }
  return true;
}

}  // namespace

BigInt min_clearing_factor(const BigRational& a, const BigRational& b) {
  BigInt l;
  mpz_lcm(l.get_mpz_t(), a.get_den_mpz_t(), b.get_den_mpz_t());
  return l;
}

BigInt IntegeratingConjecture::factor(unsigned long n) const {
  const BigInt L = n == 0 ? BigInt(1) : lcm_range(n);
  BigInt E = power(L, lcm_power);
  for (auto& s : pp_terms) {
    if (n == 0) break;
    BigInt P = pp_product(s, n);
    if (!divides(P, E)) throw DataError("Pp term does not divide lcm power at n = " + std::to_string(n));
    mpz_divexact(E.get_mpz_t(), E.get_mpz_t(), P.get_mpz_t());
  }
  return E;
}

std::string IntegeratingConjecture::str() const {
  std::string s = lcm_power == 0 ? "1" : "lcm(1..n)";
  if (lcm_power > 1) s += "^" + std::to_string(lcm_power);
  for (auto& t : pp_terms) s += " / " + t.str();
  return s;
}

IntegeratingConjecture conjecture_integerating(const std::vector<BigRational>& a,
                                               const std::vector<BigRational>& b) {
  if (a.size() != b.size()) throw UsageError("a and b must have the same length");
  const std::size_t N = a.size();
  if (N < 200) throw UsageError("conjecture_integerating needs at least 200 terms");
  const std::size_t fit_end = N - kTail;

  std::vector<BigInt> F(N);
  for (std::size_t n = 0; n < N; ++n) F[n] = min_clearing_factor(a[n], b[n]);
  const auto lcm = lcm_table(N);

  auto exponent_over = [&](std::size_t from, std::size_t to) {
    unsigned k = 0;
    for (std::size_t n = from; n < to; ++n) {
      auto e = lcm_exponent(F[n], lcm[n]);
      if (!e)
        throw ConjectureFailure("a prime above n divides the denominators at n = " + std::to_string(n) +
                                "; no power of lcm(1..n) clears them");
      k = std::max(k, *e);
    }
    return k;
  };

  IntegeratingConjecture out;
  out.lcm_power = exponent_over(0, fit_end);
  out.checked_terms = static_cast<unsigned>(N);
  const unsigned tail_k = exponent_over(fit_end, N);
  if (tail_k > out.lcm_power) {
    // The fitted power is refuted by the held-out terms.
    out.lcm_power = tail_k;
    out.status = IntegeratingConjecture::Status::empirical;
    return out;
  }
  const unsigned k = out.lcm_power;

  // Surplus exponents of the large primes, which divide lcm(1..n) once.
  std::vector<Observation> obs;
  for (std::size_t n = kFirstFitIndex; n < fit_end && k > 0; ++n) {
    auto root = static_cast<std::uint64_t>(std::sqrt(static_cast<double>(n)));
    while ((root + 1) * (root + 1) <= n) ++root;
    for (auto p : primes_in(root, n)) {
      unsigned v = mpz_divisible_ui_p(F[n].get_mpz_t(), p) ? valuation(F[n], p) : 0;
      obs.push_back({n, p, v >= k ? 0u : k - v});
    }
  }

  std::vector<PpSpec> best;
  double best_growth = 0;
  for (unsigned Q = 1; Q <= kMaxCells && !obs.empty(); ++Q) {
    std::vector<PpSpec> pp;
    for (unsigned j = 1; j <= k; ++j) {
      auto cells = full_cells(obs, Q, j);
      if (cells.empty()) break;
      pp.insert(pp.end(), cells.begin(), cells.end());
    }
    if (pp.empty()) continue;
    double g = 0;
    for (auto& s : pp) g += pp_growth_exact(s, 20).to_double();
    if (g <= best_growth + 1e-12) continue;
    if (!clears(F, lcm, k, pp, 0, fit_end)) continue;
    best = std::move(pp);
    best_growth = g;
  }

  if (!best.empty() && !clears(F, lcm, k, best, fit_end, N)) {
    out.status = IntegeratingConjecture::Status::empirical;
    return out;  // plain lcm^k still clears every term
  }
  out.pp_terms = std::move(best);
  out.status = IntegeratingConjecture::Status::exact;
  return out;
}

}  // namespace apery
