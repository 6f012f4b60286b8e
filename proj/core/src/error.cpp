#include "mmflow/error.hpp"

namespace mmflow {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kTriangleViolation: return "TriangleViolation";
    case ErrorKind::kAsymmetricDistance: return "AsymmetricDistance";
    case ErrorKind::kNonpositiveMass: return "NonpositiveMass";
    case ErrorKind::kDisconnectedGraph: return "DisconnectedGraph";
    case ErrorKind::kBadSpec: return "BadSpec";
    case ErrorKind::kBadInput: return "BadInput";
    case ErrorKind::kInfeasible: return "Infeasible";
    case ErrorKind::kDegenerateBasis: return "DegenerateBasis";
    case ErrorKind::kNonMonotoneQuotient: return "NonMonotoneQuotient";
    case ErrorKind::kUnrepresentable: return "Unrepresentable";
    case ErrorKind::kSingularForm: return "SingularForm";
    case ErrorKind::kEndpointMismatch: return "EndpointMismatch";
    case ErrorKind::kMarginalMismatch: return "MarginalMismatch";
    case ErrorKind::kBadIndices: return "BadIndices";
    case ErrorKind::kSolverFailure: return "SolverFailure";
    case ErrorKind::kBadInitial: return "BadInitial";
    case ErrorKind::kUnsupportedSpace: return "UnsupportedSpace";
    case ErrorKind::kNotCConcave: return "NotCConcave";
    case ErrorKind::kTooManyPaths: return "TooManyPaths";
  }
  return "Unknown";
}

bool is_solver_error(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kInfeasible:
    case ErrorKind::kDegenerateBasis:
    case ErrorKind::kNonMonotoneQuotient:
    case ErrorKind::kSingularForm:
    case ErrorKind::kSolverFailure:
    case ErrorKind::kTooManyPaths:
      return true;
    default:
      return false;
  }
}

}  // namespace mmflow
