#include <algorithm>
#include <cmath>
#include <condition_variable>
#include <fstream>
#include <mutex>
#include <regex>
#include <thread>

#include "declsolve/eval.hpp"
#include "io.hpp"
#include "report_io.hpp"

namespace declsolve {

namespace {

const std::regex& final_number_pattern() {
  static const std::regex re(R"(-?(?:\d{1,3}(?:,\d{3})+|\d+)(?:\.\d+)?(?:/\d+)?)");
  return re;
}

EvalRecord failed(EvalRecord r, Verdict verdict, const std::exception& e) {
  r.verdict = verdict;
  r.detail = e.what();
  return r;
}

void prepare_out_dir(const std::filesystem::path& dir, bool force) {
  namespace fs = std::filesystem;
  if (fs::exists(dir)) {
    if (!fs::is_directory(dir)) throw Error(ErrorCode::OutputExists, "'" + dir.string() + "' is not a directory");
    if (!fs::is_empty(dir)) {
      if (!force) {
        throw Error(ErrorCode::OutputExists, "'" + dir.string() + "' is not empty (use --force to overwrite)");
      }
      for (auto name : {kRunFile, kRecordsFile, kReportFile, kSummaryTextFile, kSummaryCsvFile, kRowsCsvFile}) {
        fs::remove(dir / name);
      }
    }
  }
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::IoError, "cannot create '" + dir.string() + "': " + ec.message());
}

}  // namespace

std::string_view to_string(Verdict verdict) noexcept {
  switch (verdict) {
    case Verdict::Correct: return "correct";
    case Verdict::WrongAnswer: return "wrong_answer";
    case Verdict::ParseFailure: return "parse_failure";
    case Verdict::ScriptInvalid: return "script_invalid";
    case Verdict::SolverFailure: return "solver_failure";
    case Verdict::ClientFailure: return "client_failure";
  }
  return "unknown";
}

std::optional<Verdict> parse_verdict(std::string_view name) {
  for (Verdict v : kAllVerdicts) {
    if (to_string(v) == name) return v;
  }
  return std::nullopt;
}

bool score(const Value& predicted, const Rational& gold) {
  if (predicted.is_exact()) return predicted.exact() == gold;
  const double g = gold.to_double();
  const double p = predicted.to_double();
  return std::isfinite(p) && std::fabs(p - g) <= kRelativeTolerance * std::max(1.0, std::fabs(g));
}

std::optional<Rational> extract_final_number(std::string_view transcript) {
  std::string_view last;
  std::size_t pos = 0;
  while (pos < transcript.size()) {
    auto nl = transcript.find('\n', pos);
    if (nl == std::string_view::npos) nl = transcript.size();
    const auto line = detail::trim(transcript.substr(pos, nl - pos));
    if (!line.empty()) last = line;
    pos = nl + 1;
  }
  std::optional<Rational> result;
  using It = std::string_view::const_iterator;
  for (std::regex_iterator<It> it(last.begin(), last.end(), final_number_pattern()), end; it != end; ++it) {
    std::string text = it->str();
    const auto offset = static_cast<std::size_t>(it->position());
    if (text.front() == '-' && offset > 0 && std::isalnum(static_cast<unsigned char>(last[offset - 1]))) {
      text.erase(0, 1);
    }
    std::erase(text, ',');
    if (auto r = Rational::try_parse(text)) result = std::move(r);
  }
  return result;
}

PipelineConfig load_pipeline(const std::filesystem::path& prompts_dir, Variant variant, std::string model,
                             DecodingParams params) {
  PipelineConfig p;
  p.spec = load_prompt_spec(prompts_dir, variant);
  p.model = std::move(model);
  p.params = params;
  p.prompt_hashes[prompt_file(prompts_dir, variant).filename().string()] = p.spec.source_digest;
  return p;
}

CompletionRequest make_request(const PipelineConfig& config, std::string_view question) {
  CompletionRequest req;
  req.model = config.model;
  req.prompt = assemble_prompt(config.spec, question);
  req.params = config.params;
  req.stop = config.stop;
  return req;
}

EvalRecord evaluate_transcript(const Problem& problem, std::string transcript, const PipelineConfig& config) {
  EvalRecord r;
  r.id = problem.id;
  r.question = problem.question;
  r.gold = problem.gold;
  r.transcript = std::move(transcript);
  const Variant variant = config.spec.variant;

  if (!uses_solver(variant)) {
    auto number = extract_final_number(r.transcript);
    if (!number) {
      r.verdict = Verdict::ParseFailure;
      r.detail = "no number on the final line";
      return r;
    }
    r.predicted = Value(*number);
    r.any_candidate_correct = score(*r.predicted, r.gold);
    r.verdict = r.any_candidate_correct ? Verdict::Correct : Verdict::WrongAnswer;
    return r;
  }

  const ScriptStyle style = script_style(variant);
  std::vector<Declaration> decls;
  try {
    decls = parse_transcript(r.transcript);
  } catch (const std::exception& e) {
    return failed(std::move(r), Verdict::ParseFailure, e);
  }
  if (decls.empty()) {
    r.verdict = Verdict::ParseFailure;
    r.detail = "no bracketed declarations";
    return r;
  }

  SolutionScript script;
  try {
    script = style == ScriptStyle::OneStep ? build_one_step_script(std::move(decls)) : build_script(std::move(decls));
  } catch (const std::exception& e) {
    return failed(std::move(r), Verdict::ScriptInvalid, e);
  }
  r.script = serialize_script(script);

  try {
    const PrincipleReport audit = audit_transcript(r.transcript, r.question, style);
    r.principle_warnings = static_cast<std::size_t>(std::count_if(
        audit.violations.begin(), audit.violations.end(),
        [](const PrincipleViolation& v) { return v.severity == Severity::Warning; }));
  } catch (const std::exception&) {
    r.principle_warnings = 0;
  }

  try {
    const EquationSystem system = system_from_script(script);
    r.outcome = config.solve ? config.solve(system) : solve_system(system);
  } catch (const std::exception& e) {
    return failed(std::move(r), Verdict::SolverFailure, e);
  }
  r.predicted = r.outcome->selected;
  r.any_candidate_correct = std::any_of(r.outcome->candidates.begin(), r.outcome->candidates.end(),
                                        [&](const Value& v) { return score(v, r.gold); });
  r.verdict = score(*r.predicted, r.gold) ? Verdict::Correct : Verdict::WrongAnswer;
  return r;
}

EvalRecord evaluate(const Problem& problem, const PipelineConfig& config, CompletionClient& client) {
  std::string transcript;
  try {
    transcript = client.complete(make_request(config, problem.question));
  } catch (const std::exception& e) {
    EvalRecord r;
    r.id = problem.id;
    r.question = problem.question;
    r.gold = problem.gold;
    return failed(std::move(r), Verdict::ClientFailure, e);
  }
  return evaluate_transcript(problem, std::move(transcript), config);
}

std::map<Verdict, std::size_t> RunReport::histogram() const {
  std::map<Verdict, std::size_t> h;
  for (Verdict v : kAllVerdicts) h[v] = 0;
  for (const auto& r : records) ++h[r.verdict];
  return h;
}

std::size_t RunReport::correct() const {
  return static_cast<std::size_t>(
      std::count_if(records.begin(), records.end(), [](const EvalRecord& r) { return r.verdict == Verdict::Correct; }));
}

double RunReport::solve_rate() const {
  return dataset_size == 0 ? 0.0 : 100.0 * static_cast<double>(correct()) / static_cast<double>(dataset_size);
}

double RunReport::any_candidate_rate() const {
  const auto n = std::count_if(records.begin(), records.end(),
                               [](const EvalRecord& r) { return r.any_candidate_correct; });
  return dataset_size == 0 ? 0.0 : 100.0 * static_cast<double>(n) / static_cast<double>(dataset_size);
}

RunReport run_eval(const std::vector<Problem>& problems, const PipelineConfig& config, CompletionClient& client,
                   const EvalOptions& options) {
  if (problems.empty()) throw Error(ErrorCode::InvalidArgument, "empty dataset");

  RunReport report;
  report.variant = config.spec.variant;
  report.dataset = options.dataset_name;
  report.dataset_size = problems.size();
  report.config = {config.model,        config.params, config.stop, config.prompt_hashes,
                   std::string(to_string(client.config().mode)), options.seed};
  // surface prompt problems once, not as a failure per record
  (void)assemble_prompt(config.spec, "");

  std::ofstream records_out;
  const bool writing = !options.out_dir.empty();
  if (writing) {
    prepare_out_dir(options.out_dir, options.force);
    detail::write_file(options.out_dir / kRunFile, detail::run_header_json(report));
    records_out.open(options.out_dir / kRecordsFile, std::ios::binary | std::ios::trunc);
    if (!records_out) throw Error(ErrorCode::IoError, "cannot create records file in '" + options.out_dir.string() + "'");
  }

  const std::size_t n = problems.size();
  const std::size_t workers = std::clamp<std::size_t>(options.workers, 1, n);
  std::vector<std::optional<EvalRecord>> slots(n);
  std::mutex mutex;
  std::condition_variable ready;
  std::size_t next = 0;

  {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (;;) {
          std::size_t i;
          {
            std::lock_guard lock(mutex);
            if (next >= n) return;
            i = next++;
          }
          EvalRecord rec = evaluate(problems[i], config, client);
          {
            std::lock_guard lock(mutex);
            slots[i] = std::move(rec);
          }
          ready.notify_all();
        }
      });
    }

    // single ordered writer
    report.records.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
      std::unique_lock lock(mutex);
      ready.wait(lock, [&] { return slots[i].has_value(); });
      EvalRecord rec = std::move(*slots[i]);
      slots[i].reset();
      lock.unlock();
      if (writing) {
        records_out << record_line(rec);
        records_out.flush();
        if (!records_out) throw Error(ErrorCode::IoError, "write failed for records file");
      }
      report.records.push_back(std::move(rec));
    }
  }

  if (writing) write_report(report, options.out_dir);
  return report;
}

}  // namespace declsolve
