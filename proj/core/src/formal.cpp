#include <cctype>
#include <optional>
#include <set>

#include "declsolve/formal.hpp"

namespace declsolve {

namespace {

constexpr std::string_view kOpen = "[[";
constexpr std::string_view kClose = "]]";

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

// [first, last) of the non-whitespace part of s.
std::pair<std::size_t, std::size_t> trim_bounds(std::string_view s) {
  std::size_t first = 0;
  std::size_t last = s.size();
  while (first < last && is_space(s[first])) ++first;
  while (last > first && is_space(s[last - 1])) --last;
  return {first, last};
}

std::string_view trimmed(std::string_view s) {
  auto [first, last] = trim_bounds(s);
  return s.substr(first, last - first);
}

Expr parse_side(std::string_view raw, std::size_t offset) {
  try {
    return parse_expression(raw);
  } catch (const SyntaxError& e) {
    throw SyntaxError(e.position() + offset, e.expected(), "malformed equation side");
  }
}

}  // namespace

std::vector<BracketContent> extract_brackets(std::string_view text) {
  std::vector<BracketContent> out;
  std::size_t pos = 0;
  while (true) {
    const std::size_t open = text.find(kOpen, pos);
    if (open == std::string_view::npos) break;
    const std::size_t begin = open + kOpen.size();
    const std::size_t close = text.find(kClose, begin);
    const std::size_t nested = text.find(kOpen, begin);
    if (close == std::string_view::npos || (nested != std::string_view::npos && nested < close)) {
      const std::size_t end = close == std::string_view::npos ? text.size() : close;
      throw SpanError(ErrorCode::UnterminatedBracket, Span{open, end}, "",
                      "'[[' at offset " + std::to_string(open) + " is not closed by ']]'");
    }
    out.push_back({std::string(text.substr(begin, close - begin)), Span{begin, close}});
    pos = close + kClose.size();
  }
  return out;
}

Declaration parse_declaration(std::string_view raw, Span span) {
  const auto [first, last] = trim_bounds(raw);
  const std::string_view body = raw.substr(first, last - first);

  if (body.substr(0, kVarKeyword.size()) == kVarKeyword &&
      (body.size() == kVarKeyword.size() || is_space(body[kVarKeyword.size()]))) {
    const std::string_view name = trimmed(body.substr(kVarKeyword.size()));
    if (!is_identifier(name)) {
      throw SyntaxError(first + kVarKeyword.size(), "identifier", "bad variable declaration '" + std::string(body) + "'");
    }
    return Declaration{VarDecl{std::string(name)}, span};
  }

  const std::size_t eq = body.find('=');
  if (eq == std::string_view::npos) {
    throw SyntaxError(first + body.size(), "'='", "declaration '" + std::string(body) + "' is neither 'var' nor an equation");
  }
  if (body.find('=', eq + 1) != std::string_view::npos) {
    throw SpanError(ErrorCode::MultipleEquals, span, "", "more than one '=' in '" + std::string(body) + "'");
  }

  const std::string_view lhs_raw = body.substr(0, eq);
  const std::string_view rhs_raw = body.substr(eq + 1);
  if (trimmed(lhs_raw) == kGoalKeyword) {
    const std::string_view name = trimmed(rhs_raw);
    if (!is_identifier(name)) {
      throw SyntaxError(first + eq + 1, "identifier", "goal must name a single variable");
    }
    return Declaration{GoalDecl{std::string(name)}, span};
  }
  Expr lhs = parse_side(lhs_raw, first);
  Expr rhs = parse_side(rhs_raw, first + eq + 1);
  return Declaration{EqDecl{std::move(lhs), std::move(rhs)}, span};
}

std::vector<Declaration> parse_transcript(std::string_view text) {
  std::vector<Declaration> decls;
  for (auto& bracket : extract_brackets(text)) {
    decls.push_back(parse_declaration(bracket.raw, bracket.span));
  }
  return decls;
}

SolutionScript build_script(std::vector<Declaration> decls) {
  std::set<std::string, std::less<>> declared;
  std::optional<std::size_t> goal_index;

  for (std::size_t i = 0; i < decls.size(); ++i) {
    const Declaration& d = decls[i];
    if (goal_index) {
      throw SpanError(ErrorCode::GoalNotLast, decls[*goal_index].span, "",
                      "the goal declaration must be the last declaration");
    }
    if (const auto* v = std::get_if<VarDecl>(&d.body)) {
      if (v->name == kGoalKeyword) {
        throw SpanError(ErrorCode::ReservedWord, d.span, v->name, "'answer' is reserved for the goal");
      }
      if (!declared.insert(v->name).second) {
        throw SpanError(ErrorCode::DuplicateDeclaration, d.span, v->name,
                        "variable '" + v->name + "' is declared twice");
      }
    } else if (const auto* e = std::get_if<EqDecl>(&d.body)) {
      auto names = free_vars(e->lhs);
      names.merge(free_vars(e->rhs));
      for (const auto& name : names) {
        if (name == kGoalKeyword) {
          throw SpanError(ErrorCode::ReservedWord, d.span, name, "'answer' cannot appear in an equation");
        }
        if (!declared.contains(name)) {
          throw SpanError(ErrorCode::UndeclaredVariable, d.span, name,
                          "'" + name + "' is used before it is declared");
        }
      }
    } else {
      const auto& g = std::get<GoalDecl>(d.body);
      if (!declared.contains(g.name)) {
        throw SpanError(ErrorCode::UndeclaredVariable, d.span, g.name, "goal '" + g.name + "' was never declared");
      }
      goal_index = i;
    }
  }
  if (!goal_index) throw SpanError(ErrorCode::NoGoal, Span{}, "", "no '[[answer = ...]]' declaration");

  SolutionScript script;
  script.goal = std::get<GoalDecl>(decls[*goal_index].body).name;
  script.declarations = std::move(decls);
  return script;
}

SolutionScript build_one_step_script(std::vector<Declaration> decls) {
  if (decls.size() != 1 || !decls.front().is_equation()) {
    throw SpanError(ErrorCode::NoGoal, decls.empty() ? Span{} : decls.front().span, "",
                    "expected exactly one equation, found " + std::to_string(decls.size()) + " declarations");
  }
  const Declaration& eq = decls.front();
  const auto& body = std::get<EqDecl>(eq.body);
  auto names = free_vars(body.lhs);
  names.merge(free_vars(body.rhs));
  if (names.contains(kGoalKeyword)) {
    throw SpanError(ErrorCode::ReservedWord, eq.span, std::string(kGoalKeyword), "'answer' cannot appear in an equation");
  }
  if (names.size() != 1) {
    throw SpanError(ErrorCode::NoGoal, eq.span, "",
                    "a single equation needs exactly one unknown, found " + std::to_string(names.size()));
  }
  const std::string goal = *names.begin();
  SolutionScript script;
  script.goal = goal;
  script.declarations.push_back(Declaration{VarDecl{goal}, Span{eq.span.begin, eq.span.begin}});
  script.declarations.push_back(eq);
  script.declarations.push_back(Declaration{GoalDecl{goal}, Span{eq.span.end, eq.span.end}});
  return script;
}

std::string serialize_declaration(const Declaration& decl) {
  if (const auto* v = std::get_if<VarDecl>(&decl.body)) return std::string(kVarKeyword) + " " + v->name;
  if (const auto* g = std::get_if<GoalDecl>(&decl.body)) return std::string(kGoalKeyword) + " = " + g->name;
  const auto& e = std::get<EqDecl>(decl.body);
  return render(e.lhs) + " = " + render(e.rhs);
}

std::string serialize_script(const SolutionScript& script) {
  std::string out;
  for (const auto& d : script.declarations) {
    out += serialize_declaration(d);
    out += '\n';
  }
  return out;
}

}  // namespace declsolve
