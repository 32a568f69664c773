#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "apery/polynomial.hpp"
#include "apery/real.hpp"

namespace apery {

/// sum_{j=0}^{L} p_j(n) X(n+j) = 0, normalized: content 1 and the leading
/// coefficient of p_L positive.
class PolyRecurrence {
 public:
  /// Normalizes; throws UsageError if p_L is zero or fewer than 2 polys.
  explicit PolyRecurrence(std::vector<IntPoly> coeffs);

  unsigned order() const noexcept { return static_cast<unsigned>(p_.size() - 1); }
  const std::vector<IntPoly>& coeffs() const noexcept { return p_; }
  const IntPoly& operator[](std::size_t j) const { return p_[j]; }
  /// Largest degree among the p_j.
  int degree() const noexcept;
  BigInt height() const;

  /// sum_j p_j(n) x[n+j]; requires x.size() > n + order.
  BigRational residual(const std::vector<BigRational>& x, long n) const;
  Real residual(const std::vector<Real>& x, long n) const;

  /// Same equation started at n + s (n -> n+s), normalized.
  PolyRecurrence shifted(long s) const;

  /// e.g. "(n+1)*X(n) + (-6*n-9)*X(n+1) + (n+2)*X(n+2)".
  std::string str() const;

  friend bool operator==(const PolyRecurrence&, const PolyRecurrence&) = default;

 private:
  std::vector<IntPoly> p_;
};

/// x_0 .. x_count (count + 1 values) from the first `order` of them.
/// Throws SingularRecurrenceError if p_L(n) vanishes where it is needed.
std::vector<BigRational> iterate(const PolyRecurrence& rec, const std::vector<BigRational>& init,
                                 unsigned count);

/// Runs the recurrence downward from x[top], x[top+1] to index 0 in floating
/// point; for the minimal solution this is the stable direction.
/// Returns x_0..x_{top+1}. Throws SingularRecurrenceError where p_0(n) = 0.
std::vector<Real> iterate_backward(const PolyRecurrence& rec, const Real& x_top,
                                   const Real& x_top1, unsigned top);

struct CharRoot {
  Real re, im;
  Real modulus() const;
};

struct Growth {
  Real alpha;  // modulus of the dominant characteristic root
  Real beta;   // reciprocal modulus of the recessive root
  std::vector<CharRoot> roots;
};

/// Poincare-Perron data of an order-2 recurrence.
/// Throws DegenerateAsymptoticsError for roots of equal modulus.
Growth char_growth(const PolyRecurrence& rec, int digits);

/// Smallest-height (c0, c1, c2) with c0 I0 + c1 I1 = c2 and c1 > 0.
std::optional<std::array<BigInt, 3>> find_initial_relation(const Real& I0, const Real& I1,
                                                           int digits, const BigInt& height_bound);

/// Minimal normalized recurrence fitting `values` (x_{first_index}, ...).
/// Searches (order, degree) pairs up to the given bounds in increasing
/// unknown count (order+1)(degree+1). The last 10 values are held out of
/// the fit; a candidate must reproduce every value, held-out ones
/// included, to within 25 digits of the working precision (and at least
/// half of it), and the same recurrence must come out of the search at 3/4
/// of the precision.
/// Throws UsageError when there are too few values for the bounds.
std::optional<PolyRecurrence> guess_recurrence(const std::vector<Real>& values, unsigned order,
                                               unsigned max_degree, int digits,
                                               long first_index = 0);

struct ApproxSequences {
  PolyRecurrence recurrence;
  std::vector<BigRational> a, b;
  std::array<BigInt, 3> initial_relation;
  Real constant_value;  // lim a_n / b_n
};

/// a_0 = 0, b_0 = 1 and a_1, b_1 from the initial relation, iterated up to
/// a_terms, b_terms. C is taken from the last term.
ApproxSequences make_sequences(const PolyRecurrence& rec, const std::array<BigInt, 3>& relation,
                               unsigned terms, int digits);

}  // namespace apery
