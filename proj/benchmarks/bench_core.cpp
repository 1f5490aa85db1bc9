#include <benchmark/benchmark.h>

#include <filesystem>

#include "declsolve/eval.hpp"
#include "declsolve/formal.hpp"
#include "declsolve/prompt.hpp"
#include "declsolve/solver.hpp"
#include "fixtures.hpp"
#include "generators.hpp"

using namespace declsolve;

namespace {

const std::vector<std::string> kVars{"x", "y", "total", "per_box"};

void BM_ParseExpression(benchmark::State& state) {
  testkit::Rng rng(1);
  std::vector<std::string> sources;
  for (int i = 0; i < 256; ++i) sources.push_back(render(testkit::random_expr(rng, static_cast<int>(state.range(0)), kVars)));
  std::size_t i = 0;
  for (auto _ : state) benchmark::DoNotOptimize(parse_expression(sources[i++ % sources.size()]));
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_ParseExpression)->Arg(4)->Arg(8);

void BM_ParseTranscript(benchmark::State& state) {
  const auto ex = load_exemplars(testkit::prompts_dir() / "declarative_3shot.txt");
  for (auto _ : state) {
    for (const auto& e : ex) benchmark::DoNotOptimize(build_script(parse_transcript(e.solution)));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(ex.size()));
}
BENCHMARK(BM_ParseTranscript);

void BM_SolveLinear(benchmark::State& state) {
  testkit::Rng rng(2);
  std::vector<testkit::LinearCase> cases;
  for (int i = 0; i < 64; ++i) cases.push_back(testkit::random_linear_system(rng, static_cast<std::size_t>(state.range(0))));
  std::size_t i = 0;
  for (auto _ : state) benchmark::DoNotOptimize(solve_linear(cases[i++ % cases.size()].system));
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_SolveLinear)->DenseRange(2, 6, 2);

void BM_SolveQuadratic(benchmark::State& state) {
  // x^2 - 2x = 8
  const EquationSystem system{
      {{Expr::var("x") * Expr::var("x") - Expr::num(Rational(2)) * Expr::var("x"), Expr::num(Rational(8))}}, {"x"}, "x"};
  for (auto _ : state) benchmark::DoNotOptimize(solve_system(system));
}
BENCHMARK(BM_SolveQuadratic);

void BM_AssemblePrompt(benchmark::State& state) {
  const PromptSpec spec = load_prompt_spec(testkit::prompts_dir(), Variant::DeclarativePrinciples);
  for (auto _ : state) benchmark::DoNotOptimize(assemble_prompt(spec, "Tom has 3 apples and buys 4 more."));
}
BENCHMARK(BM_AssemblePrompt);

void BM_ReplayEval(benchmark::State& state) {
  const auto problems = load_gsm8k(testkit::replay_dir() / "problems.jsonl");
  const PipelineConfig pipeline = testkit::replay_pipeline();
  const auto out = std::filesystem::temp_directory_path() / "declsolve_bench_replay";
  for (auto _ : state) {
    CompletionClient client(testkit::replay_client_config());
    benchmark::DoNotOptimize(
        run_eval(problems, pipeline, client, testkit::replay_options(static_cast<std::size_t>(state.range(0)), out)));
  }
  std::filesystem::remove_all(out);
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(problems.size()));
}
BENCHMARK(BM_ReplayEval)->Arg(1)->Arg(8)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
