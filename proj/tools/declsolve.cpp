// declsolve command line: solve, eval, check, report.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "declsolve/eval.hpp"
#include "declsolve/formal.hpp"
#include "declsolve/llm_client.hpp"
#include "declsolve/prompt.hpp"
#include "declsolve/solver.hpp"

#ifndef DECLSOLVE_DEFAULT_PROMPTS_DIR
#define DECLSOLVE_DEFAULT_PROMPTS_DIR "data/prompts"
#endif

namespace fs = std::filesystem;
using namespace declsolve;

namespace {

struct Settings {
  std::string endpoint = "https://api.openai.com/v1/completions";
  std::string model = "gpt-3.5-turbo-instruct";
  std::string api_key_env = "OPENAI_API_KEY";
  DecodingParams params;
  double timeout_seconds = 120;
  int max_in_flight = 4;
  std::string prompts_dir = DECLSOLVE_DEFAULT_PROMPTS_DIR;
  std::uint64_t seed = 0;
};

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void apply_config_file(Settings& s, const std::string& path) {
  if (path.empty()) return;
  const auto j = nlohmann::json::parse(slurp(path));
  s.endpoint = j.value("endpoint", s.endpoint);
  s.model = j.value("model", s.model);
  s.api_key_env = j.value("api_key_env", s.api_key_env);
  s.params.temperature = j.value("temperature", s.params.temperature);
  s.params.max_tokens = j.value("max_tokens", s.params.max_tokens);
  s.params.n_samples = j.value("n_samples", s.params.n_samples);
  s.timeout_seconds = j.value("timeout_seconds", s.timeout_seconds);
  s.max_in_flight = j.value("max_in_flight", s.max_in_flight);
  s.prompts_dir = j.value("prompts_dir", s.prompts_dir);
  s.seed = j.value("seed", s.seed);
  if (j.contains("api_key")) throw Error(ErrorCode::InvalidArgument, "credentials are read from the environment only");
}

struct CommonFlags {
  std::string config;
  std::string variant = "declarative_principles";
  std::string mode = "live";
  std::string cassette;
  std::string model;
  std::string endpoint;
  std::string prompts;
};

void add_common(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--config", f.config, "JSON settings file")->check(CLI::ExistingFile);
  cmd->add_option("--variant", f.variant, "Prompt variant")
      ->check(CLI::IsMember({"declarative", "declarative_principles", "declarative_llm_solves", "one_step_declarative"}));
  cmd->add_option("--mode", f.mode, "Client mode")->check(CLI::IsMember({"live", "replay", "record"}));
  cmd->add_option("--cassette", f.cassette, "Cassette file for replay and record modes");
  cmd->add_option("--model", f.model, "Model identifier");
  cmd->add_option("--endpoint", f.endpoint, "Completions endpoint URL");
  cmd->add_option("--prompts", f.prompts, "Directory with exemplar files");
}

Settings resolve(const CommonFlags& f) {
  Settings s;
  apply_config_file(s, f.config);
  if (!f.model.empty()) s.model = f.model;
  if (!f.endpoint.empty()) s.endpoint = f.endpoint;
  if (!f.prompts.empty()) s.prompts_dir = f.prompts;
  return s;
}

ClientConfig client_config(const Settings& s, ClientMode mode, const std::string& cassette,
                           const std::map<std::string, std::string>& hashes) {
  if (mode != ClientMode::Live && cassette.empty()) {
    throw Error(ErrorCode::InvalidArgument, "--cassette is required in replay and record modes");
  }
  ClientConfig c;
  c.mode = mode;
  c.endpoint = s.endpoint;
  c.api_key_env = s.api_key_env;
  c.cassette = cassette;
  c.timeout = std::chrono::milliseconds(static_cast<long long>(s.timeout_seconds * 1000));
  c.max_in_flight = s.max_in_flight;
  c.prompt_hashes = hashes;
  return c;
}

PipelineConfig pipeline(const Settings& s, Variant variant) {
  return load_pipeline(s.prompts_dir, variant, s.model, s.params);
}

std::string with_run_suffix(const std::string& path, int run) {
  const fs::path p(path);
  return (p.parent_path() / (p.stem().string() + "-run" + std::to_string(run) + p.extension().string())).string();
}

int cmd_solve(const std::string& question, const CommonFlags& flags, bool explain) {
  const Settings s = resolve(flags);
  const Variant variant = *parse_variant(flags.variant);
  PipelineConfig p = pipeline(s, variant);
  CompletionClient client(client_config(s, *parse_client_mode(flags.mode), flags.cassette, p.prompt_hashes));
  const std::string transcript = client.complete(make_request(p, question));
  if (explain) std::cout << "transcript:\n" << transcript << "\n\n";

  if (!uses_solver(variant)) {
    auto n = extract_final_number(transcript);
    if (!n) {
      std::cerr << "no number on the final line of the completion\n";
      return 1;
    }
    std::cout << "answer: " << n->to_string() << "\n";
    return 0;
  }
  auto decls = parse_transcript(transcript);
  const SolutionScript script = script_style(variant) == ScriptStyle::OneStep ? build_one_step_script(decls)
                                                                              : build_script(decls);
  const SolveOutcome outcome = solve_system(system_from_script(script));
  if (explain) {
    std::cout << "script:\n" << serialize_script(script) << "\n";
    std::cout << "trace:\n" << render_trace(outcome.trace) << "\n";
    std::cout << "candidates:";
    for (const auto& c : outcome.candidates) std::cout << " " << c.to_string();
    std::cout << "\n";
  }
  std::cout << "answer: " << outcome.selected.to_string() << "\n";
  return 0;
}

struct EvalFlags {
  std::string dataset;
  std::string format = "gsm8k";
  std::string name;
  std::size_t workers = 1;
  int runs = 1;
  std::string out;
  bool force = false;
};

int cmd_eval(const CommonFlags& flags, const EvalFlags& e) {
  Settings s = resolve(flags);
  const Variant variant = *parse_variant(flags.variant);
  const ClientMode mode = *parse_client_mode(flags.mode);
  const auto problems = e.format == "gsm8k" ? load_gsm8k(e.dataset) : load_algebra(e.dataset);
  const PipelineConfig p = pipeline(s, variant);

  EvalOptions opts;
  opts.dataset_name = e.name.empty() ? fs::path(e.dataset).stem().string() : e.name;
  opts.workers = e.workers;
  opts.force = e.force;
  opts.seed = s.seed;

  std::vector<RunReport> reports;
  for (int run = 1; run <= e.runs; ++run) {
    const bool single = e.runs == 1;
    const std::string cassette = single || flags.cassette.empty() ? flags.cassette : with_run_suffix(flags.cassette, run);
    opts.out_dir = single ? fs::path(e.out) : fs::path(e.out) / ("run" + std::to_string(run));
    CompletionClient client(client_config(s, mode, cassette, p.prompt_hashes));
    reports.push_back(run_eval(problems, p, client, opts));
    const auto& r = reports.back();
    std::fprintf(stderr, "run %d: %zu/%zu correct (%.1f%%)\n", run, r.correct(), r.dataset_size, r.solve_rate());
  }
  if (e.runs > 1) write_summary(reports, e.out);
  std::cout << summary_table(summarize(reports));
  return 0;
}

int cmd_check(const std::string& path, const std::string& question, bool one_step) {
  const std::string transcript = slurp(path);
  const ScriptStyle style = one_step ? ScriptStyle::OneStep : ScriptStyle::Incremental;
  const PrincipleReport report = audit_transcript(transcript, question, style);
  for (const auto& v : report.violations) {
    std::cout << (v.severity == Severity::Error ? "error" : "warning") << " [principle " << v.principle << "] "
              << v.message << " (chars " << v.span.begin << "-" << v.span.end << ")\n";
  }
  if (!report.has_errors()) {
    auto decls = parse_transcript(transcript);
    const SolutionScript script = one_step ? build_one_step_script(decls) : build_script(decls);
    std::cout << "script:\n" << serialize_script(script);
  }
  std::cout << (report.has_errors() ? "invalid" : "valid") << " (" << report.violations.size() << " findings)\n";
  return report.has_errors() ? 1 : 0;
}

int cmd_report(const std::string& dir) {
  const RunReport report = load_run(dir);
  write_report(report, dir);
  std::cout << summary_table(summarize({report}));
  std::fprintf(stderr, "%zu of %zu records present\n", report.records.size(), report.dataset_size);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Declarative math word problem solving with an external equation solver"};
  app.require_subcommand(1);

  CommonFlags solve_flags;
  std::string question;
  bool explain = false;
  auto* solve = app.add_subcommand("solve", "Formalize one question with the model and solve it");
  solve->add_option("question", question, "Word problem text")->required();
  solve->add_flag("--explain", explain, "Print transcript, script and solver trace");
  add_common(solve, solve_flags);

  CommonFlags eval_flags;
  EvalFlags e;
  auto* eval = app.add_subcommand("eval", "Evaluate a variant on a dataset");
  add_common(eval, eval_flags);
  eval->add_option("--dataset", e.dataset, "Dataset file")->required()->check(CLI::ExistingFile);
  eval->add_option("--format", e.format, "Dataset format")->check(CLI::IsMember({"gsm8k", "algebra"}));
  eval->add_option("--name", e.name, "Dataset name in reports (default: file stem)");
  eval->add_option("--workers", e.workers, "Concurrent problems")->check(CLI::Range(1, 256));
  eval->add_option("--runs", e.runs, "Repeated runs, each with its own cassette")->check(CLI::Range(1, 100));
  eval->add_option("--out", e.out, "Output directory")->required();
  eval->add_flag("--force", e.force, "Overwrite an existing output directory");

  std::string transcript_path;
  std::string check_question;
  std::string check_question_file;
  bool one_step = false;
  auto* check = app.add_subcommand("check", "Parse a transcript and report principle findings");
  check->add_option("transcript", transcript_path, "Transcript file")->required()->check(CLI::ExistingFile);
  auto* q_opt = check->add_option("--question", check_question, "Question text, for the unused-number check");
  check->add_option("--question-file", check_question_file, "File holding the question")
      ->check(CLI::ExistingFile)
      ->excludes(q_opt);
  check->add_flag("--one-step", one_step, "Expect a single-equation solution");

  std::string report_dir;
  auto* report = app.add_subcommand("report", "Rebuild report files from streamed records");
  report->add_option("dir", report_dir, "Run output directory")->required()->check(CLI::ExistingDirectory);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*solve) return cmd_solve(question, solve_flags, explain);
    if (*eval) return cmd_eval(eval_flags, e);
    if (*check) {
      if (!check_question_file.empty()) check_question = slurp(check_question_file);
      return cmd_check(transcript_path, check_question, one_step);
    }
    if (*report) return cmd_report(report_dir);
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return 2;
  }
  return 0;
}
