#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>

namespace declsolve {

enum class ErrorCode {
  // expressions
  UnboundVariable,
  DivisionByZero,
  NonIntegerExponent,
  ExponentTooLarge,
  NonLinear,
  // transcript parsing
  UnterminatedBracket,
  SyntaxError,
  MultipleEquals,
  // script validation
  NoGoal,
  GoalNotLast,
  UndeclaredVariable,
  DuplicateDeclaration,
  ReservedWord,
  // solving
  InconsistentBinding,
  Underdetermined,
  Inconsistent,
  NoRealRoot,
  NumericDivergence,
  Unsolvable,
  // prompts
  FormatError,
  InvalidExemplarScript,
  // completion client
  CassetteMiss,
  EndpointError,
  Timeout,
  // datasets and harness
  MissingMarker,
  UnparseableGold,
  DuplicateId,
  OutputExists,
  IoError,
  InvalidArgument,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Half-open character range [begin, end) into a transcript.
struct Span {
  std::size_t begin = 0;
  std::size_t end = 0;

  friend bool operator==(const Span&, const Span&) = default;
};

/// Base of every error the library throws. The code drives failure
/// classification in the evaluation harness.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

class SyntaxError : public Error {
 public:
  SyntaxError(std::size_t position, std::string expected, const std::string& message)
      : Error(ErrorCode::SyntaxError, message + " at offset " + std::to_string(position) +
                                          " (expected " + expected + ")"),
        position_(position),
        expected_(std::move(expected)) {}

  std::size_t position() const noexcept { return position_; }
  const std::string& expected() const noexcept { return expected_; }

 private:
  std::size_t position_;
  std::string expected_;
};

/// Errors tied to a location in the transcript (brackets, script validation).
class SpanError : public Error {
 public:
  SpanError(ErrorCode code, Span span, std::string name, const std::string& message)
      : Error(code, message), span_(span), name_(std::move(name)) {}

  Span span() const noexcept { return span_; }
  /// Offending identifier, empty when not applicable.
  const std::string& name() const noexcept { return name_; }

 private:
  Span span_;
  std::string name_;
};

}  // namespace declsolve
