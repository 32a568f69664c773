#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "apery/real.hpp"

namespace apery {

using IntMatrix = std::vector<std::vector<BigInt>>;

/// LLL reduction (Lovasz parameter `delta`) of the row basis. Exact integer
/// rows, floating Gram-Schmidt at a precision derived from the entry sizes.
/// Throws RankError when the rows are linearly dependent.
IntMatrix lll_reduce(IntMatrix basis, double delta = 0.75);

/// Rank of an integer matrix (fraction-free elimination).
std::size_t integer_rank(const IntMatrix& m);

struct IntegerRelation {
  std::vector<BigInt> coefficients;
  Real residual;   // |sum r_i x_i| at the confirmation precision
  Real tolerance;  // acceptance threshold at the search precision
  BigInt height;   // max |r_i|
};

/// Nonzero r with |sum r_i x_i| < 10^(12 - digits) and height <= bound.
///
/// The search runs on the xs rounded to `digits`; a hit is accepted only if
/// it holds on the xs' full precision, which must be at least digits + 40,
/// with the residual at least 30 orders smaller. Throws UsageError if
/// 2 <= xs.size() <= 8 fails, the xs are too coarse, or the height bound is
/// too large for the precision.
std::optional<IntegerRelation> integer_relation(const std::vector<Real>& xs, int digits,
                                                const BigInt& height_bound);

/// All confirmed relations among the reduced basis vectors, by height.
std::vector<IntegerRelation> integer_relations(const std::vector<Real>& xs, int digits,
                                               const BigInt& height_bound);

struct BasisConstant {
  std::string name;
  Real (*value)(int digits);
};

/// log 2, log 3, pi, pi^2, pi sqrt 3, sqrt 2, sqrt 3, sqrt 5, 2^(2/3),
/// Catalan, zeta(3).
const std::vector<BasisConstant>& default_basis();

struct Identification {
  enum class Kind { rational, algebraic, linear_in_basis, fractional_linear };
  Kind kind = Kind::rational;
  BigRational rational;              // rational
  std::vector<BigInt> polynomial;    // algebraic, low to high, primitive, leading > 0
  std::string basis;                 // linear_in_basis, fractional_linear
  std::array<BigRational, 2> linear; // C = linear[0] + linear[1] * basis
  std::array<BigInt, 4> fractional;  // C = (a + b k) / (c + d k)
  int verification_precision = 0;
  Real residual;
  std::string str() const;
  /// Evaluates the identified form at the given precision (real root
  /// closest to `near` for algebraic kinds).
  Real evaluate(int digits, const Real& near) const;
};

std::string kind_name(Identification::Kind k);

struct IdentifyOptions {
  std::vector<BasisConstant> basis = default_basis();
  BigInt height_bound = 0;  // 0: 10^(digits/8)
};

/// Ladder: rational, quadratic, cubic, a + b k, (a + b k)/(c + d k) for k in
/// the basis. C must carry at least digits + 40 digits for confirmation.
std::optional<Identification> identify_constant(const Real& C, int digits,
                                                const IdentifyOptions& opt = {});

/// (a, b, c, d) with C2 = (a + b C1)/(c + d C1) and ad != bc, from a
/// relation among 1, C1, C2, C1 C2. Normalized so the first nonzero of
/// (c, d) is positive.
std::optional<std::array<BigInt, 4>> equivalent_constants(const Real& C1, const Real& C2,
                                                          int digits, const BigInt& height_bound);

}  // namespace apery
