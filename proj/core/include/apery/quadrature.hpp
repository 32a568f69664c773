#pragma once

#include <functional>
#include <string>
#include <vector>

#include "apery/errors.hpp"
#include "apery/real.hpp"

namespace apery {

struct QuadratureResult {
  Real value;
  Real error_estimate;  // absolute, >= 0
  int levels_used = 0;  // finest level h = 2^-level that was summed
};

/// Raised when refinement stops at the maximum level before the estimate
/// meets tolerance. Carries the best estimate for every requested value.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, std::vector<QuadratureResult> best)
      : Error(what), best_(std::move(best)) {}
  const std::vector<QuadratureResult>& best() const noexcept { return best_; }

 private:
  std::vector<QuadratureResult> best_;
};

struct QuadratureOptions {
  int min_level = 0;     // 0 picks a default from dimension
  int max_level = 0;     // 0 picks a default from dimension
  unsigned threads = 1;  // outer-dimension fan out (multi-dimensional only)
  int guard_digits = 10;
};

/// Integrand on (0,1). Receives x and 1-x, each to full relative precision,
/// so that endpoint singularities like (1-x)^(-1/2) stay accurate.
using Integrand1D = std::function<Real(const Real& x, const Real& one_minus_x)>;

/// Tanh-sinh quadrature of f over (0,1). The level is doubled until the
/// estimated relative error falls below 10^-digits.
QuadratureResult tanh_sinh_1d(const Integrand1D& f, int digits, const QuadratureOptions& opt = {});

/// Shape of the kernel D in the tensor moment integrals below.
enum class Kernel {
  linear,  // 1 + c x            (one variable)
  zeta2,   // 1 - x y            (two variables)
  zeta3,   // 1 - z + x y z      (three variables)
};

/// The batch of integrals
///
///   M(s, n) = int prod_i x_i^p_i (1-x_i)^q_i * D^-s * (prod_i x_i(1-x_i) / D)^n
///
/// over the unit cube, for each s in `powers` and n_begin <= n < n_end.
/// All powers must differ from the first by integers.
struct MomentProblem {
  Kernel kernel = Kernel::linear;
  BigRational c = 0;  // linear kernel coefficient
  std::vector<std::pair<BigRational, BigRational>> exponents;  // (p_i, q_i)
  std::vector<BigRational> powers;
  unsigned n_begin = 0;
  unsigned n_end = 1;
};

struct MomentResult {
  // values[j][n - n_begin] for powers[j].
  std::vector<std::vector<QuadratureResult>> values;
  long long nodes_evaluated = 0;
};

/// Evaluates every integral of `problem` in one pass per level. Nodes
/// whose contribution is provably below the working precision (judged in
/// double-precision logarithms against the previous level) are skipped.
MomentResult tensor_moments(const MomentProblem& problem, int digits,
                            const QuadratureOptions& opt = {});

unsigned kernel_dimension(Kernel k) noexcept;

}  // namespace apery
