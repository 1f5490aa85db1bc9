// Acceptance checks, one PASS/FAIL line per criterion.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <set>
#include <string>

#include "fixtures.hpp"
#include "generators.hpp"

using namespace declsolve;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

struct Result {
  bool pass;
  std::string detail;
};

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt(const char* format, auto... args) {
  char buf[256];
  std::snprintf(buf, sizeof buf, format, args...);
  return buf;
}

class NoNetwork : public HttpTransport {
 public:
  std::size_t calls = 0;
  HttpResponse post(const std::string&, const std::string&, const std::vector<std::pair<std::string, std::string>>&,
                    std::chrono::milliseconds) override {
    ++calls;
    throw EndpointError(0, "network disabled");
  }
};

Result solver_oracle() {
  testkit::Rng rng(20240601);
  std::uniform_int_distribution<std::size_t> size(1, 6);
  std::vector<testkit::LinearCase> cases;
  for (int i = 0; i < 1000; ++i) cases.push_back(testkit::random_linear_system(rng, size(rng)));

  const auto start = Clock::now();
  std::size_t exact = 0;
  for (const auto& c : cases) {
    try {
      const LinearSolution s = solve_linear(c.system);
      bool ok = s.complete;
      for (std::size_t j = 0; ok && j < c.solution.size(); ++j) {
        auto it = s.values.find(testkit::unknown_name(j));
        ok = it != s.values.end() && it->second == c.solution[j];
      }
      exact += ok;
    } catch (const Error&) {
    }
  }
  const double t = seconds_since(start);
  return {exact == cases.size() && t < 5.0, fmt("%zu/%zu recovered exactly in %.3f s", exact, cases.size(), t)};
}

Result univariate_roots() {
  testkit::Rng rng(777);
  std::size_t rational_ok = 0;
  for (int i = 0; i < 200; ++i) {
    Rational a = testkit::random_rational(rng, 9, 4);
    if (a.is_zero()) a = Rational(1);
    const Rational r1 = testkit::random_rational(rng, 40, 9);
    Rational r2 = testkit::random_rational(rng, 40, 9);
    if (r2 == r1) r2 += Rational(1);
    const Expr f = testkit::quadratic(a, -a * (r1 + r2), a * r1 * r2);
    try {
      const auto roots = solve_univariate({f, Expr::num(Rational(0))}, "x");
      const std::set<std::string> got{roots.size() > 0 ? roots[0].to_string() : "", roots.size() > 1 ? roots[1].to_string() : ""};
      const std::set<std::string> want{r1.to_string(), r2.to_string()};
      const bool all_exact = std::all_of(roots.begin(), roots.end(), [](const Value& v) { return v.is_exact(); });
      rational_ok += roots.size() == 2 && all_exact && got == want;
    } catch (const Error&) {
    }
  }

  std::size_t irrational_ok = 0;
  double worst = 0;
  std::uniform_int_distribution<long> ca(1, 9);
  std::uniform_int_distribution<long> cb(-30, 30);
  for (int i = 0; i < 50;) {
    const long a = ca(rng), b = cb(rng), c = cb(rng);
    const long disc = b * b - 4 * a * c;
    if (disc <= 0) continue;
    const long s = static_cast<long>(std::llround(std::sqrt(static_cast<double>(disc))));
    if (s * s == disc) continue;
    ++i;
    const Expr f = testkit::quadratic(Rational(a), Rational(b), Rational(c));
    try {
      const auto roots = solve_univariate({f, Expr::num(Rational(0))}, "x");
      bool ok = roots.size() == 2;
      for (const auto& r : roots) {
        const double residual = std::fabs(eval_approx(f, {{"x", r.to_double()}}));
        worst = std::max(worst, residual);
        ok = ok && !r.is_exact() && residual < 1e-9;
      }
      irrational_ok += ok;
    } catch (const Error&) {
    }
  }
  return {rational_ok == 200 && irrational_ok == 50,
          fmt("%zu/200 rational pairs exact, %zu/50 irrational within 1e-9 (worst %.2e)", rational_ok, irrational_ok,
              worst)};
}

Result parser_roundtrip() {
  testkit::Rng rng(31337);
  const std::vector<std::string> vars{"x", "y", "z", "total", "per_box", "n2"};
  std::size_t ok = 0;
  std::size_t max_depth = 0;
  for (int i = 0; i < 10000; ++i) {
    const Expr e = testkit::random_expr(rng, 8, vars);
    max_depth = std::max(max_depth, depth(e));
    try {
      ok += parse_expression(render(e)) == e;
    } catch (const Error&) {
    }
  }
  return {ok == 10000 && max_depth <= 8, fmt("%zu/10000 structurally equal, max depth %zu", ok, max_depth)};
}

Result principle_enforcement() {
  const auto cases = testkit::load_principle_cases();
  std::set<int> covered;
  std::size_t ok = 0;
  std::string first_failure;
  for (const auto& c : cases) {
    for (const auto& e : c.expect) covered.insert(e.first);
    const std::string problem = testkit::check_principle_case(c);
    if (problem.empty()) {
      ++ok;
    } else if (first_failure.empty()) {
      first_failure = "; " + c.file + ": " + problem;
    }
  }
  const bool all_principles = covered == std::set<int>{1, 2, 3, 4, 5};
  return {cases.size() >= 15 && ok == cases.size() && all_principles,
          fmt("%zu/%zu fixtures flagged exactly, principles covered: %zu/5", ok, cases.size(), covered.size()) +
              first_failure};
}

Result end_to_end_replay() {
  const auto problems = load_gsm8k(testkit::replay_dir() / "problems.jsonl");
  const auto cases = testkit::load_replay_cases();
  const std::string golden = testkit::read_text(testkit::replay_dir() / "report.json");
  const PipelineConfig pipeline = testkit::replay_pipeline();
  const fs::path out = fs::temp_directory_path() / "declsolve_acceptance_replay";

  const auto start = Clock::now();
  bool identical = true;
  std::size_t network = 0;
  RunReport last;
  for (int run = 0; run < 2; ++run) {
    auto transport = std::make_shared<NoNetwork>();
    CompletionClient client(testkit::replay_client_config(), transport);
    last = run_eval(problems, pipeline, client, testkit::replay_options(4, out));
    network += client.network_calls() + transport->calls;
    identical = identical && testkit::read_text(out / kReportFile) == golden;
  }
  const double t = seconds_since(start);
  fs::remove_all(out);

  std::size_t verdicts_ok = 0;
  for (const auto& r : last.records) verdicts_ok += r.verdict == cases.at(r.id).expect;
  const auto sum_diff = std::find_if(last.records.begin(), last.records.end(), [](const EvalRecord& r) {
    return r.id == "alg-01";
  });
  const bool sum_diff_ok = sum_diff != last.records.end() && sum_diff->predicted == Value(Rational(8));
  return {problems.size() >= 25 && identical && network == 0 && t < 10.0 && verdicts_ok == problems.size() &&
              sum_diff_ok,
          fmt("%zu problems, 2 runs byte-identical to committed report: %s, solve rate %.1f, %zu/%zu verdicts as "
              "authored, network calls %zu, %.3f s",
              problems.size(), identical ? "yes" : "no", last.solve_rate(), verdicts_ok, problems.size(), network, t)};
}

Result variant_distinctness() {
  const auto exemplars = load_exemplars(testkit::prompts_dir() / "declarative_3shot.txt");
  const std::string question = "The sum of two numbers is 12 and their difference is 4. What is the larger number?";
  std::set<std::string> fingerprints;
  for (Variant v : kAllVariants) {
    PipelineConfig p;
    p.spec = make_spec(v, exemplars);
    p.model = testkit::kReplayModel;
    fingerprints.insert(fingerprint(make_request(p, question)));
  }

  std::size_t solver_calls = 0;
  PipelineConfig llm;
  llm.spec = make_spec(Variant::DeclarativeLlmSolves, exemplars);
  llm.model = testkit::kReplayModel;
  llm.solve = [&](const EquationSystem& s) {
    ++solver_calls;
    return solve_system(s);
  };
  const std::string transcript =
      "Let x be the larger number [[var x]].\nLet y be the smaller number [[var y]].\n"
      "The sum is 12, so [[x + y = 12]].\nThe difference is 4, so [[x - y = 4]].\n"
      "The answer is the value of x [[answer = x]].\nThe answer is 8.";
  const EvalRecord r = evaluate_transcript({"q", question, Rational(8)}, transcript, llm);
  return {fingerprints.size() == 4 && r.verdict == Verdict::Correct && solver_calls == 0,
          fmt("%zu distinct fingerprints for 4 variants; llm-solves verdict %s with %zu solver calls",
              fingerprints.size(), std::string(to_string(r.verdict)).c_str(), solver_calls)};
}

Result worker_invariance() {
  const auto problems = load_gsm8k(testkit::replay_dir() / "problems.jsonl");
  const PipelineConfig pipeline = testkit::replay_pipeline();
  std::vector<std::string> outputs;
  std::vector<RunReport> reports;
  for (std::size_t workers : {1u, 8u}) {
    const fs::path out = fs::temp_directory_path() / ("declsolve_acceptance_w" + std::to_string(workers));
    CompletionClient client(testkit::replay_client_config());
    reports.push_back(run_eval(problems, pipeline, client, testkit::replay_options(workers, out)));
    outputs.push_back(testkit::read_text(out / kReportFile) + testkit::read_text(out / kRecordsFile) +
                      testkit::read_text(out / kRowsCsvFile) + testkit::read_text(out / kSummaryTextFile));
    fs::remove_all(out);
  }
  const bool same = outputs[0] == outputs[1] && reports[0].records == reports[1].records;
  return {same, fmt("workers 1 and 8: reports %s, solve rate %.1f vs %.1f", same ? "identical" : "differ",
                    reports[0].solve_rate(), reports[1].solve_rate())};
}

}  // namespace

int main() {
  const std::pair<const char*, std::function<Result()>> criteria[] = {
      {"solver_oracle", solver_oracle},
      {"univariate_roots", univariate_roots},
      {"parser_roundtrip", parser_roundtrip},
      {"principle_enforcement", principle_enforcement},
      {"end_to_end_replay", end_to_end_replay},
      {"variant_distinctness", variant_distinctness},
      {"worker_invariance", worker_invariance},
  };
  int failures = 0;
  for (const auto& [name, check] : criteria) {
    Result r;
    try {
      r = check();
    } catch (const std::exception& e) {
      r = {false, std::string("threw: ") + e.what()};
    }
    std::printf("%s %s: %s\n", r.pass ? "PASS" : "FAIL", name, r.detail.c_str());
    std::fflush(stdout);
    failures += !r.pass;
  }
  return failures ? 1 : 0;
}
