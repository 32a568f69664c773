#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "apery/quadrature.hpp"

namespace apery {

enum class FamilyKind { Log1, LogRatio, Zeta2, Zeta3K };

/// One of the four parameterized integral families with exact rational
/// parameters:
///
///   Log1(a,b,c)        x^a (1-x)^b / (1+cx),                  / B(1+a,1+b)
///   LogRatio(a,b,c,d)  x^a (1-x)^b / (1+cx)^(d+1),            / same at power d, n = 0
///   Zeta2(a1,a2,b1,b2) x^-a1 (1-x)^-a2 y^-b1 (1-y)^-b2 / (1-xy),
///                                               / B(1-a1,1-a2) B(1-b1,1-b2)
///   Zeta3K(a,b,c,d,e)  x^b (1-x)^c y^e (1-y)^a z^a (1-z)^c / (1-z+xyz)^(d+1),
///                                               / same at power d, n = 0
///
/// each times (prod x_i(1-x_i) / D)^n. Construction rejects parameters
/// for which the n = 0 integrand is not absolutely integrable.
class IntegralFamily {
 public:
  static IntegralFamily make(FamilyKind kind, std::vector<BigRational> params);
  /// `kind` is one of log1, logratio, zeta2, zeta3k; `params` is a comma
  /// separated list of rationals.
  static IntegralFamily parse(std::string_view kind, std::string_view params);

  FamilyKind kind() const noexcept { return kind_; }
  const std::vector<BigRational>& params() const noexcept { return params_; }
  unsigned dimension() const noexcept;

  std::string name() const;
  /// Parameter list as "p/q,p/q,...".
  std::string params_str() const;
  /// name(params), unique per family.
  std::string canonical() const;

  /// Power of D in the numerator integrand.
  BigRational power() const;
  /// Moment problem for the unnormalized numerator integrals, n in
  /// [n_begin, n_end). If `with_normalizer_power` is set, also includes the
  /// denominator power (one less) as powers[1] for ratio families.
  MomentProblem moments(unsigned n_begin, unsigned n_end, bool with_normalizer_power = false) const;

  /// Normalizing constant when it is a product of Beta values.
  std::optional<Real> closed_normalizer(int digits) const;
  /// True for the ratio families whose normalizer needs its own integral.
  bool ratio_normalized() const noexcept;

  friend bool operator==(const IntegralFamily&, const IntegralFamily&) = default;

 private:
  IntegralFamily(FamilyKind k, std::vector<BigRational> p) : kind_(k), params_(std::move(p)) {}
  FamilyKind kind_;
  std::vector<BigRational> params_;
};

std::string family_kind_name(FamilyKind k);
FamilyKind parse_family_kind(std::string_view name);

/// Normalizer of the family: closed form or one cached quadrature.
Real family_normalizer(const IntegralFamily& family, int digits, const QuadratureOptions& opt = {});

/// Normalized I(n) to `digits` digits.
QuadratureResult family_integral(const IntegralFamily& family, unsigned n, int digits,
                                 const QuadratureOptions& opt = {});

/// Normalized I(n) for n_begin <= n < n_end in a single pass.
std::vector<QuadratureResult> family_integrals(const IntegralFamily& family, unsigned n_begin,
                                               unsigned n_end, int digits,
                                               const QuadratureOptions& opt = {});

}  // namespace apery
