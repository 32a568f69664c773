#pragma once

#include <stdexcept>
#include <string>

namespace apery {

/// Base for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Argument outside the mathematical domain of an operation
/// (digamma pole, non-integrable exponent, log of a non-positive number).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Caller asked for something the inputs cannot support
/// (too few values, precision too low for a height bound, malformed text).
class UsageError : public Error {
 public:
  using Error::Error;
};

/// Linear-algebra rank failure (dependent lattice rows).
class RankError : public Error {
 public:
  using Error::Error;
};

/// Leading recurrence coefficient vanished during iteration.
class SingularRecurrenceError : public Error {
 public:
  SingularRecurrenceError(const std::string& what, long index)
      : Error(what), index_(index) {}
  long index() const noexcept { return index_; }

 private:
  long index_;
};

/// Characteristic roots of equal modulus; Poincare-Perron does not apply.
class DegenerateAsymptoticsError : public Error {
 public:
  using Error::Error;
};

/// Non-integer or zero data where the number theory expects integers.
class DataError : public Error {
 public:
  using Error::Error;
};

/// No lcm power clears the denominators of the approximants.
class ConjectureFailure : public Error {
 public:
  using Error::Error;
};

/// Stage of the certificate pipeline that failed.
enum class Stage {
  quadrature,
  no_recurrence,
  no_initial_relation,
  degenerate_asymptotics,
  conjecture_failure,
  identification,
};

const char* stage_name(Stage s) noexcept;

class PipelineError : public Error {
 public:
  PipelineError(Stage stage, const std::string& detail)
      : Error(std::string(stage_name(stage)) + ": " + detail), stage_(stage) {}
  Stage stage() const noexcept { return stage_; }

 private:
  Stage stage_;
};

}  // namespace apery
