#include "apery/primes.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <shared_mutex>

#include "apery/errors.hpp"

namespace apery {

namespace {

class SieveCache {
 public:
  std::vector<std::uint64_t> range(std::uint64_t lo, std::uint64_t hi) {
    {
      std::shared_lock lock(mutex_);
      if (hi <= limit_) return slice(lo, hi);
    }
    std::unique_lock lock(mutex_);
    if (hi > limit_) extend(std::max(hi, 2 * limit_));
    return slice(lo, hi);
  }

 private:
  std::vector<std::uint64_t> slice(std::uint64_t lo, std::uint64_t hi) const {
    auto b = std::upper_bound(primes_.begin(), primes_.end(), lo);
    auto e = std::upper_bound(primes_.begin(), primes_.end(), hi);
    return {b, e};
  }

  // Segmented sieve over (limit_, target]. Base primes up to sqrt(target)
  // come from a small plain sieve.
  void extend(std::uint64_t target) {
    std::uint64_t root = static_cast<std::uint64_t>(std::sqrt(static_cast<double>(target))) + 1;
    std::vector<char> small(root + 1, 1);
    std::vector<std::uint64_t> base;
    for (std::uint64_t i = 2; i <= root; ++i) {
      if (!small[i]) continue;
      base.push_back(i);
      for (std::uint64_t j = i * i; j <= root; j += i) small[j] = 0;
    }
    constexpr std::uint64_t segment = 1 << 18;
    std::vector<char> mark(segment);
    for (std::uint64_t lo = limit_ + 1; lo <= target; lo += segment) {
      std::uint64_t hi = std::min(lo + segment - 1, target);
      std::fill(mark.begin(), mark.end(), 1);
      for (std::uint64_t p : base) {
        if (p * p > hi) break;
        std::uint64_t start = std::max(p * p, (lo + p - 1) / p * p);
        for (std::uint64_t j = start; j <= hi; j += p) mark[j - lo] = 0;
      }
      for (std::uint64_t v = std::max<std::uint64_t>(lo, 2); v <= hi; ++v)
        if (mark[v - lo]) primes_.push_back(v);
    }
    limit_ = target;
  }

  std::shared_mutex mutex_;
  std::vector<std::uint64_t> primes_;
  std::uint64_t limit_ = 1;
};

SieveCache& cache() {
  static SieveCache c;
  return c;
}

}  // namespace

std::vector<std::uint64_t> primes_in(std::uint64_t lo, std::uint64_t hi) {
  if (hi < lo) throw UsageError("primes_in requires hi >= lo");
  if (hi < 2) return {};
  return cache().range(lo, hi);
}

BigInt lcm_range(std::uint64_t n) {
  if (n < 1) throw UsageError("lcm_range requires n >= 1");
  BigInt result = 1;
  for (std::uint64_t p : primes_in(0, n)) {
    std::uint64_t q = p;
    while (q <= n / p) q *= p;
    result *= BigInt(static_cast<unsigned long>(q));
  }
  return result;
}

std::vector<BigInt> lcm_table(std::uint64_t n) {
  std::vector<BigInt> out(n + 1);
  out[0] = 1;
  for (std::uint64_t k = 1; k <= n; ++k) {
    out[k] = out[k - 1];
    if (std::uint64_t p = prime_power_base(k)) out[k] *= static_cast<unsigned long>(p);
  }
  return out;
}

std::uint64_t prime_power_base(std::uint64_t m) {
  if (m < 2) return 0;
  for (std::uint64_t p = 2; p * p <= m; ++p) {
    if (m % p) continue;
    while (m % p == 0) m /= p;
    return m == 1 ? p : 0;
  }
  return m;
}

unsigned valuation(const BigInt& z, std::uint64_t p) {
  if (z == 0) throw DomainError("valuation of zero");
  BigInt rest;
  BigInt pp = static_cast<unsigned long>(p);
  return static_cast<unsigned>(mpz_remove(rest.get_mpz_t(), z.get_mpz_t(), pp.get_mpz_t()));
}

}  // namespace apery
