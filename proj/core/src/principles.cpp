#include <algorithm>
#include <cctype>
#include <regex>
#include <set>

#include "declsolve/formal.hpp"

namespace declsolve {

namespace {

// Optional thousands separators, optional decimals, then an optional
// percent marker. A slash between two integers makes a fraction.
const std::regex& number_pattern() {
  static const std::regex re(
      R"((\d{1,3}(?:,\d{3})+|\d+)(?:\.(\d+))?(?:\s*/\s*(\d+))?(\s*(?:%|percent\b))?)",
      std::regex::ECMAScript | std::regex::icase);
  return re;
}

std::string strip_commas(std::string s) {
  s.erase(std::remove(s.begin(), s.end(), ','), s.end());
  return s;
}

// Sentence ranges: split on newlines and on . ? ! followed by whitespace or
// end of text, ignoring terminators inside [[ ]].
std::vector<Span> sentence_spans(std::string_view text) {
  std::vector<Span> out;
  std::size_t start = 0;
  bool in_bracket = false;
  auto flush = [&](std::size_t end) {
    std::string_view s = text.substr(start, end - start);
    if (std::any_of(s.begin(), s.end(), [](char c) { return !std::isspace(static_cast<unsigned char>(c)); })) {
      out.push_back(Span{start, end});
    }
    start = end;
  };
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (text.compare(i, 2, "[[") == 0) {
      in_bracket = true;
      ++i;
      continue;
    }
    if (in_bracket) {
      if (text.compare(i, 2, "]]") == 0) {
        in_bracket = false;
        ++i;
      }
      continue;
    }
    const char c = text[i];
    if (c == '\n') {
      flush(i + 1);
    } else if ((c == '.' || c == '?' || c == '!') &&
               (i + 1 == text.size() || std::isspace(static_cast<unsigned char>(text[i + 1])))) {
      flush(i + 1);
    }
  }
  flush(text.size());
  return out;
}

std::set<Rational> script_numerals(const std::vector<Declaration>& decls) {
  std::vector<Rational> all;
  for (const auto& d : decls) {
    if (const auto* e = std::get_if<EqDecl>(&d.body)) {
      collect_numerals(e->lhs, all);
      collect_numerals(e->rhs, all);
    }
  }
  return {all.begin(), all.end()};
}

void check_numbers(const std::vector<Declaration>& decls, std::string_view question, PrincipleReport& report) {
  const auto used = script_numerals(decls);
  for (const auto& qn : question_numbers(question)) {
    auto is_used = [&](const Rational& r) { return used.contains(r); };
    const bool hit = std::any_of(qn.aliases.begin(), qn.aliases.end(), is_used) ||
                     (!qn.parts.empty() && std::all_of(qn.parts.begin(), qn.parts.end(), is_used));
    if (!hit) {
      report.unused_question_numbers.push_back(qn.value);
      report.violations.push_back({5, Severity::Warning,
                                   "question number " + qn.text + " is not used by any equation", Span{}});
    }
  }
}

}  // namespace

bool PrincipleReport::has_errors() const {
  return std::any_of(violations.begin(), violations.end(),
                     [](const PrincipleViolation& v) { return v.severity == Severity::Error; });
}

std::vector<QuestionNumber> question_numbers(std::string_view question) {
  std::vector<QuestionNumber> out;
  const std::string text(question);
  for (std::sregex_iterator it(text.begin(), text.end(), number_pattern()), end; it != end; ++it) {
    const std::smatch& m = *it;
    // skip digits glued to letters, e.g. the 2 in "x2"
    if (m.position(0) > 0) {
      const char before = text[static_cast<std::size_t>(m.position(0)) - 1];
      if (std::isalpha(static_cast<unsigned char>(before)) || before == '_') continue;
    }
    std::string literal = strip_commas(m[1].str());
    if (m[2].matched) literal += "." + m[2].str();
    QuestionNumber qn;
    qn.text = m[0].str();
    while (!qn.text.empty() && std::isspace(static_cast<unsigned char>(qn.text.back()))) qn.text.pop_back();
    Rational value = Rational::parse(literal);
    if (m[3].matched) {
      const Rational den = Rational::parse(m[3].str());
      if (den.is_zero()) continue;
      qn.value = value / den;
      qn.aliases = {qn.value};
      qn.parts = {value, den};
    } else if (m[4].matched) {
      qn.value = value;
      qn.aliases = {value, value / Rational(100)};
    } else {
      qn.value = value;
      qn.aliases = {value};
    }
    const bool seen = std::any_of(out.begin(), out.end(), [&](const QuestionNumber& q) {
      return q.value == qn.value && q.aliases == qn.aliases;
    });
    if (!seen) out.push_back(std::move(qn));
  }
  return out;
}

PrincipleReport check_principles(const SolutionScript& script, std::string_view question) {
  PrincipleReport report;
  check_numbers(script.declarations, question, report);
  return report;
}

PrincipleReport audit_transcript(std::string_view transcript, std::string_view question, ScriptStyle style) {
  const std::vector<Declaration> decls = parse_transcript(transcript);
  PrincipleReport report;
  auto add = [&](int principle, Severity severity, std::string message, Span span) {
    report.violations.push_back({principle, severity, std::move(message), span});
  };

  if (style == ScriptStyle::OneStep) {
    try {
      build_one_step_script(decls);
    } catch (const SpanError& e) {
      add(2, Severity::Error, e.what(), e.span());
    }
    check_numbers(decls, question, report);
    return report;
  }

  // 1: one declaration per sentence
  for (const Span& s : sentence_spans(transcript)) {
    const auto count = std::count_if(decls.begin(), decls.end(), [&](const Declaration& d) {
      return d.span.begin >= s.begin && d.span.begin < s.end;
    });
    if (count == 0) {
      add(1, Severity::Warning, "sentence introduces no variable and states no equation", s);
    } else if (count > 1) {
      add(1, Severity::Warning, "sentence carries " + std::to_string(count) + " declarations", s);
    }
  }

  // 2: a single goal, and it comes last
  std::size_t goals = 0;
  for (std::size_t i = 0; i < decls.size(); ++i) {
    if (!decls[i].is_goal()) continue;
    ++goals;
    if (i + 1 != decls.size()) add(2, Severity::Error, "goal declaration is not the last declaration", decls[i].span);
  }
  if (goals == 0) add(2, Severity::Error, "no goal declaration", Span{transcript.size(), transcript.size()});

  // 3: equations only use variables declared earlier; 4: one name per quantity
  std::set<std::string, std::less<>> declared;
  for (const auto& d : decls) {
    if (const auto* v = std::get_if<VarDecl>(&d.body)) {
      if (v->name == kGoalKeyword) {
        add(3, Severity::Error, "'answer' is reserved for the goal", d.span);
      } else if (!declared.insert(v->name).second) {
        add(4, Severity::Error, "variable '" + v->name + "' is declared twice", d.span);
      }
    } else if (const auto* e = std::get_if<EqDecl>(&d.body)) {
      auto names = free_vars(e->lhs);
      names.merge(free_vars(e->rhs));
      for (const auto& name : names) {
        if (name == kGoalKeyword) {
          add(3, Severity::Error, "'answer' cannot appear in an equation", d.span);
        } else if (!declared.contains(name)) {
          add(3, Severity::Error, "'" + name + "' is used before it is declared", d.span);
        }
      }
      if (e->lhs.is_var() && e->rhs.is_var() && e->lhs.var_name() != e->rhs.var_name()) {
        add(4, Severity::Warning,
            "'" + e->lhs.var_name() + "' and '" + e->rhs.var_name() + "' name the same quantity", d.span);
      }
    } else {
      const auto& g = std::get<GoalDecl>(d.body);
      if (!declared.contains(g.name)) add(3, Severity::Error, "goal '" + g.name + "' was never declared", d.span);
    }
  }

  // 5: every question number is used
  check_numbers(decls, question, report);
  return report;
}

}  // namespace declsolve
