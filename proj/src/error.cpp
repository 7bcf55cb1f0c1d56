#include "qgraph/error.hpp"

namespace qgraph {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::SyntaxError: return "SyntaxError";
    case ErrorCode::DisconnectedGraph: return "DisconnectedGraph";
    case ErrorCode::NonPositiveLength: return "NonPositiveLength";
    case ErrorCode::DuplicateId: return "DuplicateId";
    case ErrorCode::UnknownVertexRef: return "UnknownVertexRef";
    case ErrorCode::UnknownEdge: return "UnknownEdge";
    case ErrorCode::EmptyGraph: return "EmptyGraph";
    case ErrorCode::MissingCoupling: return "MissingCoupling";
    case ErrorCode::NonMultilinear: return "NonMultilinear";
    case ErrorCode::PoleProximity: return "PoleProximity";
    case ErrorCode::NonRealEvaluation: return "NonRealEvaluation";
    case ErrorCode::ZeroLambda: return "ZeroLambda";
    case ErrorCode::SquareFreeViolation: return "SquareFreeViolation";
    case ErrorCode::SizeCap: return "SizeCap";
    case ErrorCode::ZeroAdjacentCoupling: return "ZeroAdjacentCoupling";
    case ErrorCode::ZeroParameter: return "ZeroParameter";
    case ErrorCode::NotSameType: return "NotSameType";
    case ErrorCode::IsLoop: return "IsLoop";
    case ErrorCode::NoLoopAtVertex: return "NoLoopAtVertex";
    case ErrorCode::WouldDisconnect: return "WouldDisconnect";
    case ErrorCode::EmptyResult: return "EmptyResult";
    case ErrorCode::WrongValence: return "WrongValence";
    case ErrorCode::LoopAtVertex: return "LoopAtVertex";
    case ErrorCode::NotMixedEdge: return "NotMixedEdge";
    case ErrorCode::EndpointNotDoublyZero: return "EndpointNotDoublyZero";
    case ErrorCode::VertexNotDoublyZero: return "VertexNotDoublyZero";
    case ErrorCode::UnsupportedQuasigraph: return "UnsupportedQuasigraph";
    case ErrorCode::WindowMismatch: return "WindowMismatch";
    case ErrorCode::ConditioningFailure: return "ConditioningFailure";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

}  // namespace qgraph
