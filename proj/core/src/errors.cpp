#include "declsolve/errors.hpp"

namespace declsolve {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::UnboundVariable: return "UnboundVariable";
    case ErrorCode::DivisionByZero: return "DivisionByZero";
    case ErrorCode::NonIntegerExponent: return "NonIntegerExponent";
    case ErrorCode::ExponentTooLarge: return "ExponentTooLarge";
    case ErrorCode::NonLinear: return "NonLinear";
    case ErrorCode::UnterminatedBracket: return "UnterminatedBracket";
    case ErrorCode::SyntaxError: return "SyntaxError";
    case ErrorCode::MultipleEquals: return "MultipleEquals";
    case ErrorCode::NoGoal: return "NoGoal";
    case ErrorCode::GoalNotLast: return "GoalNotLast";
    case ErrorCode::UndeclaredVariable: return "UndeclaredVariable";
    case ErrorCode::DuplicateDeclaration: return "DuplicateDeclaration";
    case ErrorCode::ReservedWord: return "ReservedWord";
    case ErrorCode::InconsistentBinding: return "InconsistentBinding";
    case ErrorCode::Underdetermined: return "Underdetermined";
    case ErrorCode::Inconsistent: return "Inconsistent";
    case ErrorCode::NoRealRoot: return "NoRealRoot";
    case ErrorCode::NumericDivergence: return "NumericDivergence";
    case ErrorCode::Unsolvable: return "Unsolvable";
    case ErrorCode::FormatError: return "FormatError";
    case ErrorCode::InvalidExemplarScript: return "InvalidExemplarScript";
    case ErrorCode::CassetteMiss: return "CassetteMiss";
    case ErrorCode::EndpointError: return "EndpointError";
    case ErrorCode::Timeout: return "Timeout";
    case ErrorCode::MissingMarker: return "MissingMarker";
    case ErrorCode::UnparseableGold: return "UnparseableGold";
    case ErrorCode::DuplicateId: return "DuplicateId";
    case ErrorCode::OutputExists: return "OutputExists";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

}  // namespace declsolve
