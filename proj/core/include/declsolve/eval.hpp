#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "declsolve/llm_client.hpp"
#include "declsolve/prompt.hpp"
#include "declsolve/rational.hpp"
#include "declsolve/solver.hpp"

namespace declsolve {

struct Problem {
  std::string id;
  std::string question;
  Rational gold;
};

/// Dataset errors carry the offending record id.
class DatasetError : public Error {
 public:
  DatasetError(ErrorCode code, std::string id, const std::string& message)
      : Error(code, "record " + id + ": " + message), id_(std::move(id)) {}
  const std::string& id() const noexcept { return id_; }

 private:
  std::string id_;
};

/// JSONL with `question` and `answer` fields. Gold is the numeral after the
/// last `####` of the answer, thousands separators removed. Records without
/// an `id` field are numbered from 1.
std::vector<Problem> parse_gsm8k(std::string_view text);
std::vector<Problem> load_gsm8k(const std::filesystem::path& path);

/// Gold of a GSM8k answer field. Throws MissingMarker / UnparseableGold.
Rational gsm8k_gold(std::string_view answer, const std::string& id);

/// CSV with a header row, a JSON array, or JSONL. Question column: question,
/// problem or text; answer column: answer, gold or solution; optional id.
/// Answers must be plain numbers. Throws UnparseableGold, DuplicateId and
/// FormatError.
std::vector<Problem> parse_algebra(std::string_view text);
std::vector<Problem> load_algebra(const std::filesystem::path& path);

/// Strict numeral, surrounding whitespace ignored: optional sign, digits with optional thousands commas,
/// optional decimals or `/q`.
std::optional<Rational> parse_numeral(std::string_view text);

enum class Verdict { Correct, WrongAnswer, ParseFailure, ScriptInvalid, SolverFailure, ClientFailure };

inline constexpr Verdict kAllVerdicts[] = {Verdict::Correct,       Verdict::WrongAnswer,   Verdict::ParseFailure,
                                           Verdict::ScriptInvalid, Verdict::SolverFailure, Verdict::ClientFailure};

std::string_view to_string(Verdict verdict) noexcept;
std::optional<Verdict> parse_verdict(std::string_view name);

inline constexpr double kRelativeTolerance = 1e-4;

/// Exact comparison for exact predictions, otherwise relative tolerance
/// against max(1, |gold|).
bool score(const Value& predicted, const Rational& gold);

/// Last numeral on the last non-empty line, for transcripts that state
/// their own answer.
std::optional<Rational> extract_final_number(std::string_view transcript);

struct EvalRecord {
  std::string id;
  std::string question;
  Rational gold;
  std::string transcript;
  std::optional<std::string> script;  // serialized, when one was built
  std::optional<SolveOutcome> outcome;
  std::optional<Value> predicted;
  Verdict verdict = Verdict::ParseFailure;
  bool any_candidate_correct = false;
  std::size_t principle_warnings = 0;
  std::string detail;  // failure message

  friend bool operator==(const EvalRecord&, const EvalRecord&) = default;
};

struct PipelineConfig {
  PromptSpec spec;
  std::string model;
  DecodingParams params;
  std::vector<std::string> stop{std::string(kDefaultStop)};
  std::map<std::string, std::string> prompt_hashes;
  SolveFn solve;  // solve_system when empty
};

/// Pipeline over the shipped exemplar file for a variant, with that file's
/// digest recorded under its file name.
PipelineConfig load_pipeline(const std::filesystem::path& prompts_dir, Variant variant, std::string model,
                             DecodingParams params = {});

CompletionRequest make_request(const PipelineConfig& config, std::string_view question);

/// Everything after the completion: extraction, script building, principle
/// audit, solving and scoring. Never throws for per-problem failures.
EvalRecord evaluate_transcript(const Problem& problem, std::string transcript, const PipelineConfig& config);
EvalRecord evaluate(const Problem& problem, const PipelineConfig& config, CompletionClient& client);

struct RunConfig {
  std::string model;
  DecodingParams params;
  std::vector<std::string> stop;
  std::map<std::string, std::string> prompt_hashes;
  std::string mode;
  std::uint64_t seed = 0;

  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

struct RunReport {
  Variant variant = Variant::Declarative;
  std::string dataset;
  std::size_t dataset_size = 0;
  RunConfig config;
  std::vector<EvalRecord> records;  // dataset order

  std::map<Verdict, std::size_t> histogram() const;  // every verdict, zeros included
  std::size_t correct() const;
  double solve_rate() const;            // percent of dataset_size
  double any_candidate_rate() const;    // percent of dataset_size
};

struct EvalOptions {
  std::string dataset_name;
  std::size_t workers = 1;
  std::filesystem::path out_dir;  // empty: nothing written
  bool force = false;
  std::uint64_t seed = 0;
};

/// Runs every problem on a worker pool. Records are streamed to
/// `records.jsonl` in dataset order as they complete, after `run.json`;
/// the full report files are written at the end. An existing non-empty
/// out_dir is refused with OutputExists unless forced.
RunReport run_eval(const std::vector<Problem>& problems, const PipelineConfig& config, CompletionClient& client,
                   const EvalOptions& options);

// Report files.
inline constexpr std::string_view kRunFile = "run.json";
inline constexpr std::string_view kRecordsFile = "records.jsonl";
inline constexpr std::string_view kReportFile = "report.json";
inline constexpr std::string_view kSummaryTextFile = "summary.txt";
inline constexpr std::string_view kSummaryCsvFile = "summary.csv";
inline constexpr std::string_view kRowsCsvFile = "rows.csv";

std::string record_line(const EvalRecord& record);
EvalRecord parse_record_line(std::string_view line);

/// Deterministic JSON: config, histogram, rates and one row per record.
std::string report_json(const RunReport& report);

/// Solve rate per variant and dataset, aggregated over runs.
struct RateSummary {
  Variant variant;
  std::string dataset;
  std::vector<double> rates;

  double mean() const;
  double stddev() const;  // sample standard deviation, 0 for a single run
};

std::vector<RateSummary> summarize(const std::vector<RunReport>& runs);

/// Variants down, datasets across, `mean` or `mean ± sd` per cell.
std::string summary_table(const std::vector<RateSummary>& summaries);
std::string summary_csv(const std::vector<RateSummary>& summaries);
std::string rows_csv(const RunReport& report);

/// Writes report.json, summary.txt, summary.csv and rows.csv.
void write_report(const RunReport& report, const std::filesystem::path& dir);

/// Aggregate summary.txt and summary.csv for several runs.
void write_summary(const std::vector<RunReport>& runs, const std::filesystem::path& dir);

/// Rebuilds a report from run.json and whatever records.jsonl holds, so a
/// partial run can be summarized after a crash.
RunReport load_run(const std::filesystem::path& dir);

}  // namespace declsolve
