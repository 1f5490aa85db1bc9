#include "declsolve/prompt.hpp"

#include "declsolve/digest.hpp"
#include "declsolve/solver.hpp"
#include "io.hpp"

namespace declsolve {

namespace {

constexpr std::string_view kPrinciples[] = {
    "Each sentence in the solution either introduces a new variable or states a new equation.",
    "The last sentence gives the goal: which variable will contain the answer to the problem.",
    "Each equation only uses previously introduced variables.",
    "Each quantity is only named by one variable.",
    "The solution uses all the numbers in the question.",
};

std::string_view strip_line(std::string_view line) {
  while (!line.empty() && (line.back() == '\r' || line.back() == ' ' || line.back() == '\t')) line.remove_suffix(1);
  return line;
}

std::string_view solution_label(Variant variant) {
  return variant == Variant::OneStepDeclarative ? kOneStepSolutionLabel : kSolutionLabel;
}

std::string answer_line(const Exemplar& exemplar, std::size_t index) {
  const SolutionScript script = exemplar_script(exemplar, index, ScriptStyle::Incremental);
  SolveOutcome outcome;
  try {
    outcome = solve_system(system_from_script(script));
  } catch (const Error& e) {
    throw InvalidExemplarScript(index, e.code(), e.what());
  }
  if (!outcome.selected.is_exact()) {
    throw InvalidExemplarScript(index, ErrorCode::InvalidArgument, "answer has no exact value");
  }
  return std::string(kAnswerLinePrefix) + outcome.selected.exact().to_string() + ".";
}

}  // namespace

std::string_view to_string(Variant variant) noexcept {
  switch (variant) {
    case Variant::Declarative: return "declarative";
    case Variant::DeclarativePrinciples: return "declarative_principles";
    case Variant::DeclarativeLlmSolves: return "declarative_llm_solves";
    case Variant::OneStepDeclarative: return "one_step_declarative";
  }
  return "unknown";
}

std::optional<Variant> parse_variant(std::string_view name) {
  for (Variant v : kAllVariants) {
    if (to_string(v) == name) return v;
  }
  return std::nullopt;
}

bool uses_solver(Variant variant) noexcept { return variant != Variant::DeclarativeLlmSolves; }

bool wants_principles(Variant variant) noexcept {
  return variant == Variant::DeclarativePrinciples || variant == Variant::DeclarativeLlmSolves;
}

ScriptStyle script_style(Variant variant) noexcept {
  return variant == Variant::OneStepDeclarative ? ScriptStyle::OneStep : ScriptStyle::Incremental;
}

SolutionScript exemplar_script(const Exemplar& exemplar, std::size_t index, ScriptStyle style) {
  try {
    auto decls = parse_transcript(exemplar.solution);
    if (style == ScriptStyle::OneStep) {
      if (decls.size() != 1) {
        throw InvalidExemplarScript(index, ErrorCode::InvalidArgument,
                                    "expected exactly one bracketed equation, found " + std::to_string(decls.size()));
      }
      return build_one_step_script(std::move(decls));
    }
    return build_script(std::move(decls));
  } catch (const InvalidExemplarScript&) {
    throw;
  } catch (const Error& e) {
    throw InvalidExemplarScript(index, e.code(), e.what());
  }
}

std::vector<Exemplar> parse_exemplars(std::string_view text, ScriptStyle style) {
  enum class State { Preamble, Question, Solution } state = State::Preamble;
  std::vector<Exemplar> out;
  std::string question;
  std::string solution;
  std::size_t sentinel_line = 0;

  auto finish = [&](std::size_t line) {
    const auto q = detail::trim(question);
    const auto s = detail::trim(solution);
    if (q.empty()) throw FormatError(sentinel_line, "empty question");
    if (s.empty()) throw FormatError(line, "empty solution");
    out.push_back({std::string(q), std::string(s)});
    question.clear();
    solution.clear();
  };

  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    const std::string_view raw = text.substr(pos, nl - pos);
    pos = nl + 1;
    ++line_no;
    const std::string_view line = strip_line(raw);

    if (line == kQuestionSentinel) {
      if (state == State::Question) throw FormatError(line_no, "question without a solution");
      if (state == State::Solution) finish(line_no);
      state = State::Question;
      sentinel_line = line_no;
      continue;
    }
    if (line == kSolutionSentinel) {
      if (state != State::Question) throw FormatError(line_no, "solution without a question");
      state = State::Solution;
      continue;
    }
    switch (state) {
      case State::Preamble:
        if (!detail::trim(line).empty() && line.front() != '#') {
          throw FormatError(line_no, "text before the first " + std::string(kQuestionSentinel));
        }
        break;
      case State::Question: question.append(raw).append("\n"); break;
      case State::Solution: solution.append(raw).append("\n"); break;
    }
  }
  if (state == State::Question) throw FormatError(line_no, "question without a solution");
  if (state == State::Solution) finish(line_no);
  if (out.empty()) throw FormatError(line_no == 0 ? 1 : line_no, "no exemplars");

  for (std::size_t i = 0; i < out.size(); ++i) exemplar_script(out[i], i, style);
  return out;
}

std::vector<Exemplar> load_exemplars(const std::filesystem::path& path, ScriptStyle style) {
  return parse_exemplars(detail::read_file(path), style);
}

std::string format_exemplars(const std::vector<Exemplar>& exemplars) {
  std::string out;
  for (const auto& e : exemplars) {
    out.append(kQuestionSentinel).append("\n").append(e.question).append("\n");
    out.append(kSolutionSentinel).append("\n").append(e.solution).append("\n\n");
  }
  return out;
}

std::string principles_header_text() {
  std::string out = "Principles for solutions:";
  for (std::size_t i = 0; i < std::size(kPrinciples); ++i) {
    out += "\n" + std::to_string(i + 1) + ". ";
    out += kPrinciples[i];
  }
  return out;
}

PromptSpec make_spec(Variant variant, std::vector<Exemplar> exemplars) {
  PromptSpec spec;
  spec.variant = variant;
  spec.exemplars = std::move(exemplars);
  if (wants_principles(variant)) spec.principles_header = principles_header_text();
  return spec;
}

std::filesystem::path prompt_file(const std::filesystem::path& prompts_dir, Variant variant) {
  return prompts_dir / (variant == Variant::OneStepDeclarative ? "one_step_3shot.txt" : "declarative_3shot.txt");
}

PromptSpec load_prompt_spec(const std::filesystem::path& prompts_dir, Variant variant) {
  const std::string text = detail::read_file(prompt_file(prompts_dir, variant));
  PromptSpec spec = make_spec(variant, parse_exemplars(text, script_style(variant)));
  spec.source_digest = sha256_hex(text);
  return spec;
}

std::string assemble_prompt(const PromptSpec& spec, std::string_view question) {
  if (wants_principles(spec.variant) && !spec.principles_header) {
    throw Error(ErrorCode::InvalidArgument,
                std::string("variant ") + std::string(to_string(spec.variant)) + " needs a principles header");
  }
  const std::string_view label = solution_label(spec.variant);
  std::string out;
  if (spec.principles_header) out.append(*spec.principles_header).append(kBlockSeparator);
  for (std::size_t i = 0; i < spec.exemplars.size(); ++i) {
    const Exemplar& e = spec.exemplars[i];
    out.append(kQuestionPrefix).append(e.question).append("\n");
    out.append(label).append("\n").append(e.solution);
    if (spec.variant == Variant::DeclarativeLlmSolves) out.append("\n").append(answer_line(e, i));
    out.append(kBlockSeparator);
  }
  out.append(kQuestionPrefix).append(question).append("\n");
  out.append(label).append("\n");
  return out;
}

}  // namespace declsolve
