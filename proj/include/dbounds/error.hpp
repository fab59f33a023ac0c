#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace dbounds {

enum class ErrorCode {
  // Data and configuration problems.
  EmptyInput,
  MixedOutcomeAvailability,
  NonBinaryOutcome,
  ProbabilityRowNotNormalized,
  UnknownClassColumn,
  UnknownClass,
  MissingColumn,
  ParseError,
  ValueOutsideBins,
  NoCommonSupport,
  SupportMismatch,
  InvalidProblem,
  InvalidArgument,
  ConfigError,
  IoError,
  EmptyReport,
  // Identification problems that make a measure undefined on the given data.
  ZeroClassPrior,
  WrongClassCount,
  ZeroDenominatorRisk,
  ZeroDenominator,
  MetricUnavailable,
  // Solver failures.
  InfeasibleConstraints,
  EmptyGrid,
  AllGridPointsInfeasible,
  DegenerateProfile,
  SolverFailure,
  TooManyPairs,
  // Verification.
  BudgetExceeded,
  NoFeasiblePoint,
};

std::string_view error_code_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace dbounds
