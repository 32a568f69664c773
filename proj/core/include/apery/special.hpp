#pragma once

#include "apery/real.hpp"

namespace apery {

/// Bernoulli number B_k as an exact rational (B_1 = -1/2). Cached.
BigRational bernoulli(unsigned k);

/// Psi(x) = Gamma'(x)/Gamma(x) for rational x > 0.
///
/// Shifts the argument upward with Psi(x) = Psi(x+1) - 1/x and sums the
/// Stirling-type asymptotic series there. Throws DomainError for x <= 0.
Real digamma(const BigRational& x, int digits);

/// Gamma(x) for rational x that is not a non-positive integer.
Real gamma(const BigRational& x, int digits);

/// Euler Beta function B(a, b) = Gamma(a)Gamma(b)/Gamma(a+b), a, b > 0.
Real beta(const BigRational& a, const BigRational& b, int digits);

}  // namespace apery
