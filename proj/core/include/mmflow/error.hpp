#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace mmflow {

/// Failure categories raised by the library. The CLI maps solver-side kinds
/// to exit code 3 and input-side kinds to exit code 2.
enum class ErrorKind {
  kTriangleViolation,
  kAsymmetricDistance,
  kNonpositiveMass,
  kDisconnectedGraph,
  kBadSpec,
  kBadInput,
  kInfeasible,
  kDegenerateBasis,
  kNonMonotoneQuotient,
  kUnrepresentable,
  kSingularForm,
  kEndpointMismatch,
  kMarginalMismatch,
  kBadIndices,
  kSolverFailure,
  kBadInitial,
  kUnsupportedSpace,
  kNotCConcave,
  kTooManyPaths,
};

std::string_view to_string(ErrorKind kind);

/// True for kinds that signal a numerical failure rather than bad input.
bool is_solver_error(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace mmflow
