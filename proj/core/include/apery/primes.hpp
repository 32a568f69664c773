#pragma once

#include <cstdint>
#include <vector>

#include "apery/real.hpp"

namespace apery {

/// Ascending primes p with lo < p <= hi.
///
/// Backed by a process-wide segmented sieve. The cache grows on demand
/// under an exclusive lock; lookups inside the cached range only take a
/// shared lock.
std::vector<std::uint64_t> primes_in(std::uint64_t lo, std::uint64_t hi);

/// lcm(1, 2, ..., n) for n >= 1.
BigInt lcm_range(std::uint64_t n);

/// All of lcm(1..k) for k = 0..n (entry 0 is 1), built incrementally.
std::vector<BigInt> lcm_table(std::uint64_t n);

/// If m = p^j with j >= 1, returns p; otherwise 0.
std::uint64_t prime_power_base(std::uint64_t m);

/// Exponent of the prime p in z (z != 0).
unsigned valuation(const BigInt& z, std::uint64_t p);

}  // namespace apery
