#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace qgraph {

enum class ErrorCode {
  SyntaxError,
  DisconnectedGraph,
  NonPositiveLength,
  DuplicateId,
  UnknownVertexRef,
  UnknownEdge,
  EmptyGraph,
  MissingCoupling,
  NonMultilinear,
  PoleProximity,
  NonRealEvaluation,
  ZeroLambda,
  SquareFreeViolation,
  SizeCap,
  ZeroAdjacentCoupling,
  ZeroParameter,
  NotSameType,
  IsLoop,
  NoLoopAtVertex,
  WouldDisconnect,
  EmptyResult,
  WrongValence,
  LoopAtVertex,
  NotMixedEdge,
  EndpointNotDoublyZero,
  VertexNotDoublyZero,
  UnsupportedQuasigraph,
  WindowMismatch,
  ConditioningFailure,
  InvalidArgument,
};

std::string_view to_string(ErrorCode code);

/// Domain error raised by every module. The code is stable and is what the
/// CLI reports in its JSON error object.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace qgraph
