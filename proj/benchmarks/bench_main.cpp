#include <benchmark/benchmark.h>

#include <random>
#include <string>
#include <vector>

#include "planverify/corpus.hpp"
#include "planverify/ltl.hpp"
#include "planverify/metrics.hpp"
#include "planverify/rules.hpp"
#include "planverify/verifier.hpp"

using namespace planverify;

namespace {

const std::string kData = PLANVERIFY_DATA_DIR;

Tokens random_tokens(std::mt19937_64& rng, std::size_t n, int vocab) {
  std::uniform_int_distribution<int> pick(0, vocab - 1);
  Tokens t(n);
  for (auto& x : t) x = "action " + std::to_string(pick(rng));
  return t;
}

void BM_LcsSimilarity(benchmark::State& state) {
  std::mt19937_64 rng(1);
  const auto n = static_cast<std::size_t>(state.range(0));
  const Tokens a = random_tokens(rng, n, 20);
  const Tokens b = random_tokens(rng, n, 20);
  for (auto _ : state) benchmark::DoNotOptimize(lcs_similarity(a, b));
}
BENCHMARK(BM_LcsSimilarity)->Arg(8)->Arg(32)->Arg(64)->Arg(256);

void BM_ParseFormula(benchmark::State& state) {
  const std::string text = "F(heat_water) & F(add_tea_bag) & F(serve) & (!pour_hot_water U heat_water) & "
                           "G(!spill | F(wipe_counter))";
  for (auto _ : state) benchmark::DoNotOptimize(ltl::parse(text));
}
BENCHMARK(BM_ParseFormula);

void BM_EvalTrace(benchmark::State& state) {
  const auto f = ltl::parse("G(a | F(b U c)) & (!c U a)");
  std::mt19937_64 rng(2);
  std::vector<std::vector<std::string>> steps(static_cast<std::size_t>(state.range(0)));
  for (auto& s : steps) {
    for (const char* p : {"a", "b", "c"}) {
      if (rng() % 2) s.push_back(p);
    }
  }
  const ltl::Trace t(steps);
  for (auto _ : state) benchmark::DoNotOptimize(ltl::eval_trace(f, t, 0));
}
BENCHMARK(BM_EvalTrace)->Arg(8)->Arg(32);

void BM_VerifyTea(benchmark::State& state) {
  RuleBackend rb(RuleDomain::load(kData + "/tea/tea_rules.json"));
  const std::string task = "Make a cup of tea with sugar";
  const Plan p = Plan::from_texts(task, {"check timer", "heat water", "prepare cup", "pour tea", "pour tea",
                                         "add sugar", "stir tea", "serve"});
  VerifyOptions opts;
  opts.formula = "F(heat_water) & F(add_tea_bag) & F(serve)";
  for (auto _ : state) benchmark::DoNotOptimize(verify(p, task, rb, {}, opts));
}
BENCHMARK(BM_VerifyTea);

void BM_EvalCorpus(benchmark::State& state) {
  const Corpus c = load_corpus(kData + "/household/corpus.jsonl");
  RuleBackend rb(RuleDomain::load(kData + "/household/household_rules.json"));
  JobConfig cfg;
  cfg.jobs = 1;
  for (auto _ : state) benchmark::DoNotOptimize(run_job(c, cfg, rb));
}
BENCHMARK(BM_EvalCorpus);

}  // namespace

BENCHMARK_MAIN();
