#pragma once

#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "declsolve/errors.hpp"
#include "declsolve/expr.hpp"

namespace declsolve {

/// Parses an arithmetic expression.
///
/// Grammar, loosest to tightest: `+ -` (left), `* /` (left), unary `-`,
/// `^` (right). Parentheses group. Numerals are exact: `0.25` is 1/4, and
/// the whitespace-free literal `(p/q)` is the single rational p/q, which
/// is how the canonical renderer writes non-integer literals. There is no
/// implicit multiplication. Throws SyntaxError.
Expr parse_expression(std::string_view source);

struct BracketContent {
  std::string raw;
  Span span;  // offsets of `raw` inside the transcript, delimiters excluded
};

/// Contents of every `[[ ... ]]` in document order. Brackets do not nest: an
/// opening `[[` before the previous one closed is reported as
/// UnterminatedBracket, as is a `[[` that never closes.
std::vector<BracketContent> extract_brackets(std::string_view text);

inline constexpr std::string_view kGoalKeyword = "answer";
inline constexpr std::string_view kVarKeyword = "var";

struct VarDecl {
  std::string name;
};

struct EqDecl {
  Expr lhs;
  Expr rhs;
};

struct GoalDecl {
  std::string name;
};

struct Declaration {
  std::variant<VarDecl, EqDecl, GoalDecl> body;
  Span span;

  bool is_var() const { return std::holds_alternative<VarDecl>(body); }
  bool is_equation() const { return std::holds_alternative<EqDecl>(body); }
  bool is_goal() const { return std::holds_alternative<GoalDecl>(body); }
};

/// `var <ident>`, `answer = <ident>` or `<expr> = <expr>`. Throws
/// SyntaxError or MultipleEquals (as a SpanError).
Declaration parse_declaration(std::string_view raw, Span span = {});

/// Extracts and parses every bracket of a transcript.
std::vector<Declaration> parse_transcript(std::string_view text);

struct SolutionScript {
  std::vector<Declaration> declarations;
  std::string goal;
};

/// Validates an incremental script: exactly one goal and it comes last,
/// every equation only mentions variables declared before it, no variable
/// is declared twice, and `answer` is never used as a variable. Throws
/// SpanError with NoGoal, GoalNotLast, UndeclaredVariable,
/// DuplicateDeclaration or ReservedWord.
SolutionScript build_script(std::vector<Declaration> decls);

/// Script for a single-equation formalization: exactly one equation in
/// exactly one unknown, which becomes the goal. Variables are declared
/// implicitly.
SolutionScript build_one_step_script(std::vector<Declaration> decls);

/// One declaration per line: `var x`, `<lhs> = <rhs>`, `answer = x`.
std::string serialize_script(const SolutionScript& script);
std::string serialize_declaration(const Declaration& decl);

enum class Severity { Error, Warning };

struct PrincipleViolation {
  int principle = 0;  // 1..5
  Severity severity = Severity::Warning;
  std::string message;
  Span span;
};

struct PrincipleReport {
  std::vector<PrincipleViolation> violations;
  std::vector<Rational> unused_question_numbers;

  bool has_errors() const;
};

/// Numerals mentioned in a question, in order of first appearance and
/// without duplicates. Thousands separators are stripped; `N%` yields both
/// N and N/100 as a single alias group.
struct QuestionNumber {
  Rational value;
  std::vector<Rational> aliases;  // any of these counts as a use
  std::vector<Rational> parts;    // or all of these, e.g. 3 and 4 for "3/4"
  std::string text;
};
std::vector<QuestionNumber> question_numbers(std::string_view question);

/// Usage of question numbers by a valid script. Findings are warnings.
PrincipleReport check_principles(const SolutionScript& script, std::string_view question);

enum class ScriptStyle { Incremental, OneStep };

/// Every principle finding for a whole transcript, without throwing on the
/// first one. Structural findings (goal, ordering, duplicates) are errors;
/// sentence-shape, aliasing and unused-number findings are warnings.
/// Parse failures still throw, since nothing can be audited without the
/// declarations.
PrincipleReport audit_transcript(std::string_view transcript, std::string_view question,
                                 ScriptStyle style = ScriptStyle::Incremental);

}  // namespace declsolve
