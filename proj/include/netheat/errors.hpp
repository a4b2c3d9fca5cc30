#pragma once

#include <stdexcept>
#include <string>

namespace netheat {

/// Failure classes surfaced by the library. Each class maps to a distinct
/// process exit code (see error_exit_code) so scripted callers can branch.
enum class ErrorCode {
  Disconnected,
  IndexOutOfRange,
  NotDegreeOne,
  OutOfUnitInterval,
  NonSquare,
  DimensionTooLarge,
  DimensionMismatch,
  NotPositiveGenerator,
  NonPositiveCoefficient,
  DiscontinuousAtVertex,
  NonzeroAtDirichlet,
  NoDirichlet,
  SingularPencil,
  SingularSystem,
  EigensolverFailure,
  WindowTooNarrow,
  MissingPrerequisite,
  MeshMismatch,
  HypothesisViolated,
  NotPositive,
  DegenerateFit,
  EvaluationOutOfRange,
  Blowup,
  ParseError,
  ValidationError,
  InvalidArgument,
};

const char* error_code_name(ErrorCode code);

/// Stable nonzero exit code for a failure class (10 + enum position).
int error_exit_code(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
  throw Error(code, std::string(error_code_name(code)) + ": " + message);
}

}  // namespace netheat
