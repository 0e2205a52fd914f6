#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace wavepursuit {

enum class ErrorCode {
  // environment
  InvalidDimensions,
  NonPositiveCellSize,
  ShapeOutOfBounds,
  DisconnectedFreeSpace,
  OutOfBounds,
  NotBoundaryCell,
  DegenerateNormal,
  // field solver
  NoConvergence,
  UnstableTimeStep,
  MissingPreviousStep,
  TargetInsideObstacle,
  // guidance
  QueryInObstacle,
  OutOfDomain,
  SingularGradient,
  // agents / game
  FieldKindMismatch,
  SolverFailure,
  ScenarioInvalid,
  // analysis
  MissingSnapshots,
  TraceTooShort,
  // io
  ParseError,
  ValidationError,
  IOError,
  SchemaMismatch,
};

constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidDimensions: return "InvalidDimensions";
    case ErrorCode::NonPositiveCellSize: return "NonPositiveCellSize";
    case ErrorCode::ShapeOutOfBounds: return "ShapeOutOfBounds";
    case ErrorCode::DisconnectedFreeSpace: return "DisconnectedFreeSpace";
    case ErrorCode::OutOfBounds: return "OutOfBounds";
    case ErrorCode::NotBoundaryCell: return "NotBoundaryCell";
    case ErrorCode::DegenerateNormal: return "DegenerateNormal";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::UnstableTimeStep: return "UnstableTimeStep";
    case ErrorCode::MissingPreviousStep: return "MissingPreviousStep";
    case ErrorCode::TargetInsideObstacle: return "TargetInsideObstacle";
    case ErrorCode::QueryInObstacle: return "QueryInObstacle";
    case ErrorCode::OutOfDomain: return "OutOfDomain";
    case ErrorCode::SingularGradient: return "SingularGradient";
    case ErrorCode::FieldKindMismatch: return "FieldKindMismatch";
    case ErrorCode::SolverFailure: return "SolverFailure";
    case ErrorCode::ScenarioInvalid: return "ScenarioInvalid";
    case ErrorCode::MissingSnapshots: return "MissingSnapshots";
    case ErrorCode::TraceTooShort: return "TraceTooShort";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::ValidationError: return "ValidationError";
    case ErrorCode::IOError: return "IOError";
    case ErrorCode::SchemaMismatch: return "SchemaMismatch";
  }
  return "Unknown";
}

/// Every failure raised by the library carries a machine-readable code.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace wavepursuit
