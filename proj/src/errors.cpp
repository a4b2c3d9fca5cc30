#include "netheat/errors.hpp"

namespace netheat {

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::Disconnected: return "Disconnected";
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::NotDegreeOne: return "NotDegreeOne";
    case ErrorCode::OutOfUnitInterval: return "OutOfUnitInterval";
    case ErrorCode::NonSquare: return "NonSquare";
    case ErrorCode::DimensionTooLarge: return "DimensionTooLarge";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::NotPositiveGenerator: return "NotPositiveGenerator";
    case ErrorCode::NonPositiveCoefficient: return "NonPositiveCoefficient";
    case ErrorCode::DiscontinuousAtVertex: return "DiscontinuousAtVertex";
    case ErrorCode::NonzeroAtDirichlet: return "NonzeroAtDirichlet";
    case ErrorCode::NoDirichlet: return "NoDirichlet";
    case ErrorCode::SingularPencil: return "SingularPencil";
    case ErrorCode::SingularSystem: return "SingularSystem";
    case ErrorCode::EigensolverFailure: return "EigensolverFailure";
    case ErrorCode::WindowTooNarrow: return "WindowTooNarrow";
    case ErrorCode::MissingPrerequisite: return "MissingPrerequisite";
    case ErrorCode::MeshMismatch: return "MeshMismatch";
    case ErrorCode::HypothesisViolated: return "HypothesisViolated";
    case ErrorCode::NotPositive: return "NotPositive";
    case ErrorCode::DegenerateFit: return "DegenerateFit";
    case ErrorCode::EvaluationOutOfRange: return "EvaluationOutOfRange";
    case ErrorCode::Blowup: return "Blowup";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::ValidationError: return "ValidationError";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
  }
  return "UnknownError";
}

int error_exit_code(ErrorCode code) { return 10 + static_cast<int>(code); }

}  // namespace netheat
