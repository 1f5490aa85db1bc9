#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "declsolve/errors.hpp"
#include "declsolve/formal.hpp"

namespace declsolve {

enum class Variant {
  Declarative,            // bracketed script, solved externally
  DeclarativePrinciples,  // same, with the principles header
  DeclarativeLlmSolves,   // header, and the model states the answer itself
  OneStepDeclarative,     // a single equation per solution
};

inline constexpr Variant kAllVariants[] = {Variant::Declarative, Variant::DeclarativePrinciples,
                                           Variant::DeclarativeLlmSolves, Variant::OneStepDeclarative};

/// `declarative`, `declarative_principles`, `declarative_llm_solves`,
/// `one_step_declarative`.
std::string_view to_string(Variant variant) noexcept;
std::optional<Variant> parse_variant(std::string_view name);

bool uses_solver(Variant variant) noexcept;
bool wants_principles(Variant variant) noexcept;
ScriptStyle script_style(Variant variant) noexcept;

struct Exemplar {
  std::string question;
  std::string solution;

  friend bool operator==(const Exemplar&, const Exemplar&) = default;
};

struct PromptSpec {
  Variant variant = Variant::Declarative;
  std::vector<Exemplar> exemplars;
  std::optional<std::string> principles_header;
  std::string source_digest;  // sha-256 of the exemplar file, empty if built in memory
};

struct DecodingParams {
  double temperature = 0.0;
  int max_tokens = 600;
  int n_samples = 1;

  friend bool operator==(const DecodingParams&, const DecodingParams&) = default;
};

// Prompt scaffolding. Changing any of these invalidates recorded cassettes.
inline constexpr std::string_view kQuestionPrefix = "Question: ";
inline constexpr std::string_view kSolutionLabel = "Solution:";
inline constexpr std::string_view kOneStepSolutionLabel = "Solution (single equation):";
inline constexpr std::string_view kBlockSeparator = "\n\n";
inline constexpr std::string_view kAnswerLinePrefix = "The answer is ";
inline constexpr std::string_view kDefaultStop = "\nQuestion:";

inline constexpr std::string_view kQuestionSentinel = "=== QUESTION ===";
inline constexpr std::string_view kSolutionSentinel = "=== SOLUTION ===";

class FormatError : public Error {
 public:
  FormatError(std::size_t line, const std::string& message)
      : Error(ErrorCode::FormatError, "line " + std::to_string(line) + ": " + message), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class InvalidExemplarScript : public Error {
 public:
  InvalidExemplarScript(std::size_t index, ErrorCode cause, const std::string& message)
      : Error(ErrorCode::InvalidExemplarScript, "exemplar " + std::to_string(index + 1) + ": " + message),
        index_(index),
        cause_(cause) {}

  std::size_t index() const noexcept { return index_; }  // zero-based
  ErrorCode cause() const noexcept { return cause_; }

 private:
  std::size_t index_;
  ErrorCode cause_;
};

/// Parses sentinel-delimited exemplar text. Blank lines and `#` comment
/// lines may precede the first sentinel; each field is trimmed. Every
/// solution is validated as a script of the given style.
std::vector<Exemplar> parse_exemplars(std::string_view text, ScriptStyle style = ScriptStyle::Incremental);
std::vector<Exemplar> load_exemplars(const std::filesystem::path& path,
                                     ScriptStyle style = ScriptStyle::Incremental);
std::string format_exemplars(const std::vector<Exemplar>& exemplars);

/// Throws InvalidExemplarScript when the solution is not a valid script.
SolutionScript exemplar_script(const Exemplar& exemplar, std::size_t index, ScriptStyle style);

/// The five solution principles as a numbered list under a title line.
std::string principles_header_text();

/// Spec for a variant, attaching the principles header where the variant
/// calls for one.
PromptSpec make_spec(Variant variant, std::vector<Exemplar> exemplars);

/// Shipped exemplar file for a variant inside a prompts directory.
std::filesystem::path prompt_file(const std::filesystem::path& prompts_dir, Variant variant);

/// Loads and validates the shipped exemplars for a variant.
PromptSpec load_prompt_spec(const std::filesystem::path& prompts_dir, Variant variant);

/// Header, exemplar blocks, then the test question with an empty solution
/// slot. For the llm-solves variant every exemplar solution is followed by
/// its solved answer. Throws InvalidArgument when a variant's header is
/// missing, and InvalidExemplarScript when an llm-solves exemplar has no
/// answer.
std::string assemble_prompt(const PromptSpec& spec, std::string_view question);

}  // namespace declsolve
