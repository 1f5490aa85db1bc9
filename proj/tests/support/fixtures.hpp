#pragma once

#include <json.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "declsolve/eval.hpp"
#include "declsolve/formal.hpp"

namespace declsolve::testkit {

namespace fs = std::filesystem;

inline fs::path source_dir() { return fs::path(DECLSOLVE_SOURCE_DIR); }
inline fs::path prompts_dir() { return source_dir() / "data" / "prompts"; }
inline fs::path replay_dir() { return source_dir() / "tests" / "fixtures" / "replay"; }
inline fs::path principles_dir() { return source_dir() / "tests" / "fixtures" / "principles"; }

inline std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

// Replay fixture: the CLI defaults, so `declsolve eval --mode replay` over
// the fixture reproduces the committed report.
inline constexpr const char* kReplayModel = "gpt-3.5-turbo-instruct";
inline constexpr Variant kReplayVariant = Variant::DeclarativePrinciples;
inline constexpr const char* kReplayDataset = "replay25";
inline constexpr const char* kReplayRecordedAt = "2024-01-01T00:00:00Z";

struct ReplayCase {
  std::string transcript;
  Verdict expect;
};

inline std::map<std::string, ReplayCase> load_replay_cases() {
  const auto j = nlohmann::json::parse(read_text(replay_dir() / "transcripts.json"));
  std::map<std::string, ReplayCase> out;
  for (const auto& [id, v] : j.items()) {
    out[id] = {v.at("transcript").get<std::string>(), *parse_verdict(v.at("expect").get<std::string>())};
  }
  return out;
}

inline PipelineConfig replay_pipeline() { return load_pipeline(prompts_dir(), kReplayVariant, kReplayModel); }

inline ClientConfig replay_client_config() {
  ClientConfig c;
  c.mode = ClientMode::Replay;
  c.cassette = replay_dir() / "cassette.jsonl";
  return c;
}

inline EvalOptions replay_options(std::size_t workers, fs::path out) {
  EvalOptions o;
  o.dataset_name = kReplayDataset;
  o.workers = workers;
  o.out_dir = std::move(out);
  o.force = true;
  return o;
}

// Principle fixtures: a manifest of transcripts with their seeded findings.
struct PrincipleCase {
  std::string file;
  std::string question;
  ScriptStyle style = ScriptStyle::Incremental;
  std::vector<std::pair<int, Severity>> expect;
  std::optional<std::string> build_error;
};

inline std::vector<PrincipleCase> load_principle_cases() {
  const auto j = nlohmann::json::parse(read_text(principles_dir() / "manifest.json"));
  std::vector<PrincipleCase> out;
  for (const auto& c : j) {
    PrincipleCase p;
    p.file = c.at("file").get<std::string>();
    p.question = c.at("question").get<std::string>();
    p.style = c.at("style").get<std::string>() == "one_step" ? ScriptStyle::OneStep : ScriptStyle::Incremental;
    for (const auto& e : c.at("expect")) {
      p.expect.emplace_back(e.at("principle").get<int>(),
                            e.at("severity").get<std::string>() == "error" ? Severity::Error : Severity::Warning);
    }
    if (!c.at("build_error").is_null()) p.build_error = c["build_error"].get<std::string>();
    out.push_back(std::move(p));
  }
  return out;
}

// Empty when the checker reports exactly the seeded findings; otherwise a
// description of the mismatch.
inline std::string check_principle_case(const PrincipleCase& c) {
  const std::string transcript = read_text(principles_dir() / c.file);
  auto sorted = [](std::vector<std::pair<int, Severity>> v) {
    std::sort(v.begin(), v.end());
    return v;
  };
  auto describe = [](const std::vector<std::pair<int, Severity>>& v) {
    std::string s = "[";
    for (const auto& [p, sev] : v) s += " " + std::to_string(p) + (sev == Severity::Error ? "E" : "W");
    return s + " ]";
  };

  std::vector<std::pair<int, Severity>> got;
  for (const auto& v : audit_transcript(transcript, c.question, c.style).violations) got.emplace_back(v.principle, v.severity);
  if (sorted(got) != sorted(c.expect)) return "audit found " + describe(got) + ", expected " + describe(c.expect);

  std::optional<std::string> build_error;
  std::optional<SolutionScript> script;
  try {
    auto decls = parse_transcript(transcript);
    script = c.style == ScriptStyle::OneStep ? build_one_step_script(std::move(decls)) : build_script(std::move(decls));
  } catch (const Error& e) {
    build_error = std::string(to_string(e.code()));
  }
  if (build_error != c.build_error) {
    return "build gave " + build_error.value_or("success") + ", expected " + c.build_error.value_or("success");
  }
  if (script) {
    std::vector<std::pair<int, Severity>> numbers;
    for (const auto& v : check_principles(*script, c.question).violations) numbers.emplace_back(v.principle, v.severity);
    std::vector<std::pair<int, Severity>> want;
    for (const auto& e : c.expect) {
      if (e.first == 5) want.push_back(e);
    }
    if (sorted(numbers) != sorted(want)) return "number check found " + describe(numbers) + ", expected " + describe(want);
  }
  return {};
}

}  // namespace declsolve::testkit
