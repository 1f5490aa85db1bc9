#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <set>

#include <unistd.h>

#include "declsolve/prompt.hpp"
#include "declsolve/solver.hpp"

using namespace declsolve;
namespace fs = std::filesystem;

namespace {

const fs::path kPrompts = fs::path(DECLSOLVE_SOURCE_DIR) / "data" / "prompts";

const Exemplar kSumDiff{
    "The sum of two numbers is 12 and their difference is 4. What is the larger number?",
    "Let x be the larger number [[var x]].\nLet y be the smaller number [[var y]].\n"
    "The sum is 12, so [[x + y = 12]].\nThe difference is 4, so [[x - y = 4]].\n"
    "The answer is the value of x [[answer = x]]."};

const Exemplar kChain{"Ann has 2 pens and buys 3 more. How many pens does she have?",
                      "Let a be the pens Ann has [[var a]].\nWe have [[a = 2 + 3]].\n"
                      "The answer is the value of a [[answer = a]]."};

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto nl = text.find('\n', pos);
    if (nl == std::string::npos) nl = text.size();
    out.push_back(text.substr(pos, nl - pos));
    pos = nl + 1;
  }
  return out;
}

}  // namespace

TEST(Variants, NamesRoundTrip) {
  for (Variant v : kAllVariants) EXPECT_EQ(parse_variant(to_string(v)), v);
  EXPECT_FALSE(parse_variant("declarative_8shot"));
  EXPECT_FALSE(uses_solver(Variant::DeclarativeLlmSolves));
  EXPECT_TRUE(uses_solver(Variant::OneStepDeclarative));
  EXPECT_EQ(script_style(Variant::OneStepDeclarative), ScriptStyle::OneStep);
}

TEST(DecodingParams, Defaults) {
  const DecodingParams p;
  EXPECT_EQ(p.temperature, 0.0);
  EXPECT_EQ(p.max_tokens, 600);
  EXPECT_EQ(p.n_samples, 1);
}

TEST(PrinciplesHeader, FiveNumberedLines) {
  const std::string h = principles_header_text();
  EXPECT_EQ(h, principles_header_text());
  const auto l = lines(h);
  ASSERT_EQ(l.size(), 6u);
  EXPECT_EQ(l[0], "Principles for solutions:");
  EXPECT_EQ(l[1], "1. Each sentence in the solution either introduces a new variable or states a new equation.");
  EXPECT_EQ(l[2], "2. The last sentence gives the goal: which variable will contain the answer to the problem.");
  EXPECT_EQ(l[3], "3. Each equation only uses previously introduced variables.");
  EXPECT_EQ(l[4], "4. Each quantity is only named by one variable.");
  EXPECT_EQ(l[5], "5. The solution uses all the numbers in the question.");
}

TEST(AssemblePrompt, QuestionOnly) {
  EXPECT_EQ(assemble_prompt(make_spec(Variant::Declarative, {}), "Q"), "Question: Q\nSolution:\n");
  EXPECT_EQ(assemble_prompt(make_spec(Variant::OneStepDeclarative, {}), "Q"),
            "Question: Q\nSolution (single equation):\n");
}

TEST(AssemblePrompt, ExactLayout) {
  const std::string got = assemble_prompt(make_spec(Variant::DeclarativePrinciples, {kChain}), "Q?");
  const std::string want = principles_header_text() + "\n\n" + "Question: " + kChain.question + "\nSolution:\n" +
                           kChain.solution + "\n\n" + "Question: Q?\nSolution:\n";
  EXPECT_EQ(got, want);
}

TEST(AssemblePrompt, LlmSolvesAppendsComputedAnswers) {
  const std::string got = assemble_prompt(make_spec(Variant::DeclarativeLlmSolves, {kChain, kSumDiff}), "Q?");
  // 2 + 3 = 5; x + y = 12, x - y = 4 gives x = 8
  EXPECT_NE(got.find(kChain.solution + "\nThe answer is 5.\n\n"), std::string::npos);
  EXPECT_NE(got.find(kSumDiff.solution + "\nThe answer is 8.\n\n"), std::string::npos);
  EXPECT_EQ(got.find(principles_header_text()), 0u);
}

TEST(AssemblePrompt, LlmSolvesRejectsUnsolvableExemplar) {
  const Exemplar bad{"Q", "Let x be it [[var x]]. Let y be it [[var y]]. So [[x + y = 3]]. [[answer = x]]"};
  try {
    assemble_prompt(make_spec(Variant::DeclarativeLlmSolves, {kChain, bad}), "Q");
    FAIL();
  } catch (const InvalidExemplarScript& e) {
    EXPECT_EQ(e.index(), 1u);
    EXPECT_EQ(e.cause(), ErrorCode::Underdetermined);
  }
}

TEST(AssemblePrompt, MissingHeaderIsRejected) {
  PromptSpec spec = make_spec(Variant::DeclarativePrinciples, {kChain});
  spec.principles_header.reset();
  try {
    assemble_prompt(spec, "Q");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InvalidArgument);
  }
}

TEST(AssemblePrompt, Deterministic) {
  const PromptSpec spec = make_spec(Variant::DeclarativePrinciples, {kChain, kSumDiff});
  EXPECT_EQ(assemble_prompt(spec, "What?"), assemble_prompt(spec, "What?"));
}

TEST(AssemblePrompt, LengthMonotonicity) {
  std::vector<Exemplar> ex;
  std::size_t previous = assemble_prompt(make_spec(Variant::Declarative, ex), "Q").size();
  for (int i = 0; i < 4; ++i) {
    ex.push_back(i % 2 ? kSumDiff : kChain);
    const std::size_t now = assemble_prompt(make_spec(Variant::Declarative, ex), "Q").size();
    EXPECT_GT(now, previous);
    previous = now;
  }
  PromptSpec with = make_spec(Variant::DeclarativePrinciples, ex);
  PromptSpec without = with;
  without.variant = Variant::Declarative;
  without.principles_header.reset();
  EXPECT_LT(assemble_prompt(without, "Q").size(), assemble_prompt(with, "Q").size());
}

TEST(AssemblePrompt, VariantsArePairwiseDistinct) {
  std::set<std::string> prompts;
  for (Variant v : kAllVariants) prompts.insert(assemble_prompt(make_spec(v, {kChain, kSumDiff}), "Q"));
  EXPECT_EQ(prompts.size(), std::size(kAllVariants));
}

TEST(LoadExemplars, ShippedDeclarativeSet) {
  const auto ex = load_exemplars(kPrompts / "declarative_3shot.txt");
  ASSERT_EQ(ex.size(), 3u);
  for (std::size_t i = 0; i < ex.size(); ++i) {
    const auto script = exemplar_script(ex[i], i, ScriptStyle::Incremental);
    const auto report = audit_transcript(ex[i].solution, ex[i].question);
    EXPECT_TRUE(report.violations.empty()) << i;
    EXPECT_NO_THROW(solve_system(system_from_script(script)));
  }
  // 5 + 3 * 4 = 17
  EXPECT_EQ(solve_system(system_from_script(exemplar_script(ex[0], 0, ScriptStyle::Incremental))).selected,
            Value(Rational(17)));
}

TEST(LoadExemplars, ShippedOneStepSet) {
  const auto ex = load_exemplars(kPrompts / "one_step_3shot.txt", ScriptStyle::OneStep);
  ASSERT_EQ(ex.size(), 3u);
  for (const auto& e : ex) EXPECT_EQ(extract_brackets(e.solution).size(), 1u);
  // both files pose the same questions with matching answers
  const auto inc = load_exemplars(kPrompts / "declarative_3shot.txt");
  for (std::size_t i = 0; i < ex.size(); ++i) {
    EXPECT_EQ(ex[i].question, inc[i].question);
    const auto a = solve_system(system_from_script(exemplar_script(ex[i], i, ScriptStyle::OneStep))).selected;
    const auto b = solve_system(system_from_script(exemplar_script(inc[i], i, ScriptStyle::Incremental))).selected;
    EXPECT_EQ(a, b) << i;
  }
}

TEST(LoadPromptSpec, AttachesHeaderAndDigest) {
  const PromptSpec p = load_prompt_spec(kPrompts, Variant::DeclarativePrinciples);
  EXPECT_TRUE(p.principles_header);
  EXPECT_EQ(p.source_digest.size(), 64u);
  EXPECT_FALSE(load_prompt_spec(kPrompts, Variant::Declarative).principles_header);
  EXPECT_NE(load_prompt_spec(kPrompts, Variant::OneStepDeclarative).source_digest, p.source_digest);
}

TEST(ParseExemplars, FormatErrors) {
  auto line_of = [](std::string_view text) -> std::size_t {
    try {
      parse_exemplars(text);
    } catch (const FormatError& e) {
      return e.line();
    }
    ADD_FAILURE() << "accepted: " << text;
    return 0;
  };
  EXPECT_EQ(line_of(""), 1u);
  EXPECT_EQ(line_of("# only comments\n\n"), 2u);
  EXPECT_EQ(line_of("stray text\n=== QUESTION ===\nQ\n=== SOLUTION ===\n[[var x]] [[answer = x]]\n"), 1u);
  EXPECT_EQ(line_of("=== QUESTION ===\nQ\n=== QUESTION ===\n"), 3u);
  EXPECT_GT(line_of("=== QUESTION ===\nQ\n"), 0u);
  EXPECT_GT(line_of("=== QUESTION ===\n\n=== SOLUTION ===\n[[var x]] [[x = 1]] [[answer = x]]\n"), 0u);
}

TEST(ParseExemplars, ForwardReferenceIsInvalid) {
  const std::string text =
      "=== QUESTION ===\nQ1\n=== SOLUTION ===\nLet a be it [[var a]]. [[a = 1]]. [[answer = a]]\n"
      "=== QUESTION ===\nQ2\n=== SOLUTION ===\nWe know [[b = 2 * c]]. Let b [[var b]]. Let c [[var c]]. "
      "[[c = 1]]. [[answer = b]]\n";
  try {
    parse_exemplars(text);
    FAIL();
  } catch (const InvalidExemplarScript& e) {
    EXPECT_EQ(e.index(), 1u);
    EXPECT_EQ(e.cause(), ErrorCode::UndeclaredVariable);
  }
}

TEST(ParseExemplars, OneStepRequiresSingleBracket) {
  const std::string text = "=== QUESTION ===\nQ\n=== SOLUTION ===\n[[var x]] [[x = 2]]\n";
  EXPECT_THROW(parse_exemplars(text, ScriptStyle::OneStep), InvalidExemplarScript);
  EXPECT_NO_THROW(parse_exemplars(text + "[[answer = x]]\n"));
}

TEST(ParseExemplars, WriteThenReload) {
  const std::vector<Exemplar> ex{kChain, kSumDiff};
  EXPECT_EQ(parse_exemplars(format_exemplars(ex)), ex);

  const fs::path dir = fs::temp_directory_path() / ("declsolve_prompt_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  const auto shipped = load_exemplars(kPrompts / "declarative_3shot.txt");
  {
    std::ofstream out(dir / "copy.txt", std::ios::binary);
    out << format_exemplars(shipped);
  }
  EXPECT_EQ(load_exemplars(dir / "copy.txt"), shipped);
  fs::remove_all(dir);
}
