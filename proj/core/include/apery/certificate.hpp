#pragma once

#include <array>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "apery/family.hpp"
#include "apery/lattice.hpp"
#include "apery/recurrence.hpp"

namespace apery {

/// Primes p with e1 < {n/p} < e2, e3 < p/n < e4 and p mod M in residues.
struct PpSpec {
  BigRational e1 = 0, e2 = 1, e3 = 0, e4 = 1;
  std::vector<unsigned long> residues = {0};
  unsigned long modulus = 1;

  /// Throws UsageError unless 0 <= e1 < e2 <= 1, 0 <= e3 < e4, M >= 1 and
  /// the residues are a nonempty subset of 0..M-1.
  void validate() const;
  std::string str() const;
  friend bool operator==(const PpSpec&, const PpSpec&) = default;
};

/// Product of the qualifying primes (1 if none).
BigInt pp_product(const PpSpec& spec, unsigned long n);

/// lim log Pp(spec; n) / n from the prime number theorem: the Dirichlet
/// density of the coprime residues times the total length of the windows
/// (1/(k+e2), 1/(k+e1)) clipped to (e3, e4). The infinite tail that occurs
/// when e3 = 0 telescopes into Psi(K+e2) - Psi(K+e1).
Real pp_growth_exact(const PpSpec& spec, int digits);

/// lcm of the denominators of a and b.
BigInt min_clearing_factor(const BigRational& a, const BigRational& b);

struct IntegeratingConjecture {
  enum class Status { exact, empirical };
  unsigned lcm_power = 0;
  std::vector<PpSpec> pp_terms;  // E(n) = lcm(1..n)^k / prod Pp_t(n)
  Status status = Status::empirical;
  unsigned checked_terms = 0;
  /// E(n) under the conjecture.
  BigInt factor(unsigned long n) const;
  std::string str() const;
};

/// Smallest k with F(n) | lcm(1..n)^k for every n, refined by Pp terms that
/// the surplus lcm^k / F(n) shows consistently. Needs at least 200 terms;
/// the last 100 are held out to validate. Throws ConjectureFailure when no
/// finite lcm power works.
IntegeratingConjecture conjecture_integerating(const std::vector<BigRational>& a,
                                               const std::vector<BigRational>& b);

struct DeltaMeasure {
  Real delta;
  std::optional<Real> measure;  // 1 + 1/delta when delta > 0
};

/// delta = (log beta - nu)/(log alpha + nu). Throws DomainError when
/// log alpha + nu = 0 or the preconditions fail.
DeltaMeasure delta_and_measure(const Real& alpha, const Real& beta, const Real& nu);

/// Least-squares slope of -log|C - a'_n/b'_n| against log|b'_n| over the
/// tail half, minus one; a'_n, b'_n = E(n) a_n, E(n) b_n reduced to lowest
/// terms. Terms whose error is below the precision of C are dropped.
Real empirical_delta(const Real& C, const std::vector<BigRational>& a,
                     const std::vector<BigRational>& b, const std::vector<BigInt>& E);

/// Slope of log E(n) / n over the last quarter, E(n) = F(n) / gcd(num a_n,
/// num b_n) the rational factor making E a_n, E b_n coprime integers.
Real empirical_nu(const std::vector<BigRational>& a, const std::vector<BigRational>& b,
                  int digits);

struct IrrationalityCertificate {
  enum class Verdict { irrationality_candidate, approximation_only };
  enum class NuSource { exact, empirical };

  IrrationalityCertificate(IntegralFamily f, PolyRecurrence r)
      : family(std::move(f)), recurrence(std::move(r)) {}

  IntegralFamily family;
  int precision = 0;
  Real constant_value;
  std::optional<Identification> identification;
  PolyRecurrence recurrence;
  std::array<BigInt, 3> initial_relation;
  Real alpha, beta;
  Real nu;
  NuSource nu_source = NuSource::empirical;
  Real delta;
  std::optional<Real> measure;
  unsigned terms_computed = 0;
  Verdict verdict = Verdict::approximation_only;

  // Verification data.
  std::optional<IntegeratingConjecture> integerating;
  std::string integerating_note;     // why the conjecture failed, if it did
  unsigned first_index = 0;          // quadrature window start
  std::vector<Real> quadrature;      // normalized I(n) for the window
  Real recurrence_residual;          // worst relative residual on the window
  Real relation_residual;            // |c0 I0 + c1 I1 - c2|
  Real consistency_residual;         // worst |I(n) - (b_n C - a_n)| / |I(n)|
  Real empirical_beta;
  bool beta_disagrees = false;       // more than 1% apart
  std::optional<Real> empirical_delta;
  Real I0, I1;
};

std::string verdict_name(IrrationalityCertificate::Verdict v);

/// lim a_n / b_n recomputed from the certificate's recurrence and initial
/// relation at any precision.
Real certificate_constant(const IrrationalityCertificate& cert, int digits);

/// Intermediate results; anything already present is reused, which is how
/// the command-line cache resumes an interrupted run.
struct PipelineState {
  unsigned first_index = 0;
  int values_digits = 0;
  std::vector<Real> values;       // unnormalized numerator moments from first_index
  std::vector<Real> norm_values;  // ratio families without a closed normalizer
  std::optional<PolyRecurrence> recurrence;
  std::optional<Real> normalizer;
  std::optional<Real> I0, I1;
  std::optional<std::array<BigInt, 3>> relation;
  std::vector<BigRational> a, b;
};

struct PipelineOptions {
  unsigned first_index = 2;
  unsigned max_order = 2;
  unsigned max_degree = 10;
  int guard_digits = 15;
  QuadratureOptions quadrature;
  bool identify = true;
  std::function<void(const std::string&)> log;  // progress messages
  /// Called whenever a stage adds to the state, so callers can persist it.
  std::function<void(const PipelineState&)> checkpoint;
};

/// Full pipeline: quadrature, recurrence guess, initial relation, exact
/// sequences, asymptotics, integer-ating factor, delta and identification.
/// Each failure is a PipelineError naming its stage.
IrrationalityCertificate build_certificate(const IntegralFamily& family, unsigned terms,
                                           int digits, const PipelineOptions& opt = {},
                                           PipelineState* state = nullptr);

}  // namespace apery
