// Acceptance gate: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails.  Each check is self-contained and timed.

#include <algorithm>
#include <array>
#include <bitset>
#include <chrono>
#include <cstdio>
#include <functional>
#include <mutex>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "planverify/corpus.hpp"
#include "planverify/metrics.hpp"
#include "planverify/rules.hpp"
#include "planverify/translator.hpp"
#include "planverify/verifier.hpp"

using namespace planverify;

namespace {

const std::string kData = PLANVERIFY_DATA_DIR;

struct Outcome {
  bool ok = true;
  std::string detail;
};

// Collects the first few failure messages of a check.
class Check {
 public:
  void expect(bool cond, const std::string& what) {
    if (cond) return;
    ++failures_;
    if (failures_ <= 3) msgs_.push_back(what);
  }
  Outcome done(std::string summary) const {
    if (failures_ == 0) return {true, std::move(summary)};
    std::string d = std::to_string(failures_) + " failure(s): ";
    for (std::size_t k = 0; k < msgs_.size(); ++k) d += (k ? "; " : "") + msgs_[k];
    return {false, d};
  }

 private:
  std::size_t failures_ = 0;
  std::vector<std::string> msgs_;
};

std::string join(const std::vector<std::string>& v) {
  std::string s;
  for (const auto& x : v) s += (s.empty() ? "" : ", ") + x;
  return "[" + s + "]";
}

std::string without_timestamp(std::string s) {
  const auto p = s.find("\"generated_at\"");
  if (p == std::string::npos) return s;
  return s.erase(p, s.find('\n', p) - p);
}

/// Forwards to another backend and records every request.
class Recorder final : public Backend {
 public:
  explicit Recorder(Backend& inner) : inner_(inner) {}
  JudgeDecision judge(const JudgeRequest& r) override {
    {
      std::lock_guard lock(mu_);
      judged_.push_back(r);
    }
    return inner_.judge(r);
  }
  std::string complete(const TranslationRequest& r) override {
    {
      std::lock_guard lock(mu_);
      ++translations_;
    }
    return inner_.complete(r);
  }
  std::string name() const override { return "recorder(" + inner_.name() + ")"; }
  const std::vector<JudgeRequest>& judged() const { return judged_; }
  std::size_t translations() const { return translations_; }

 private:
  Backend& inner_;
  std::mutex mu_;
  std::vector<JudgeRequest> judged_;
  std::size_t translations_ = 0;
};

/// Uniformly random, always well-formed decisions.
class RandomBackend final : public Backend {
 public:
  explicit RandomBackend(std::uint64_t seed) : rng_(seed) {}
  JudgeDecision judge(const JudgeRequest& r) override {
    switch (std::uniform_int_distribution<int>(0, 3)(rng_)) {
      case 0: return JudgeDecision::remove();
      case 1: {
        const std::size_t hi = r.plan_size + 1;  // sometimes out of range
        return JudgeDecision::move(std::uniform_int_distribution<std::size_t>(0, hi)(rng_));
      }
      case 2: return JudgeDecision::augment("new " + std::to_string(counter_++));
      default: return JudgeDecision::keep();
    }
  }
  std::string complete(const TranslationRequest&) override { return "F(x)"; }
  std::string name() const override { return "random"; }

 private:
  std::mt19937_64 rng_;
  std::size_t counter_ = 0;
};

// ---------------------------------------------------------------------------

Outcome tea_regression() {
  Check c;
  const RuleDomain dom = RuleDomain::load(kData + "/tea/tea_rules.json");
  RuleBackend rb(dom);
  const std::vector<std::string> faulty = {"check timer", "heat water",  "prepare cup", "pour tea",
                                           "pour tea",    "add sugar",   "stir tea",    "serve"};
  const std::vector<std::string> expected = {"check timer", "heat water", "prepare cup",   "add tea bag",
                                             "pour hot water", "add sugar",  "stir tea", "serve"};
  const std::string task = "Make a cup of tea with sugar";
  VerifyOptions opts;
  opts.formula = "F(heat_water) & F(add_tea_bag) & F(serve) & (!pour_hot_water U heat_water)";
  const auto r = verify(Plan::from_texts(task, faulty), task, rb, {}, opts);
  c.expect(r.output.texts() == expected, "output " + join(r.output.texts()));
  c.expect(r.passes <= 3, "passes " + std::to_string(r.passes));
  c.expect(r.stop_reason == StopReason::Converged, "stop reason " + std::string(to_string(r.stop_reason)));
  return c.done(std::to_string(r.edits.size()) + " edits, " + std::to_string(r.passes) + " passes");
}

// Every sequence over {a,b,c} of length <= 8, indexed by (length, base-3
// value).  A sequence's subsequence set is a bitset over the same index, so
// two sequences share a common subsequence of length k iff their bitsets
// intersect inside the length-k block.
Outcome lcs_exhaustive() {
  constexpr int kMaxLen = 8;
  std::vector<std::string> seqs;
  std::array<std::size_t, kMaxLen + 2> block{};  // block[k] = first index of length k
  for (int len = 0; len <= kMaxLen; ++len) {
    block[len] = seqs.size();
    std::size_t count = 1;
    for (int k = 0; k < len; ++k) count *= 3;
    for (std::size_t v = 0; v < count; ++v) {
      std::string s(len, 'a');
      std::size_t x = v;
      for (int k = len - 1; k >= 0; --k, x /= 3) s[k] = static_cast<char>('a' + x % 3);
      seqs.push_back(s);
    }
  }
  block[kMaxLen + 1] = seqs.size();
  const std::size_t n = seqs.size();
  auto index_of = [&](const std::string& s) {
    std::size_t v = 0;
    for (char ch : s) v = v * 3 + static_cast<std::size_t>(ch - 'a');
    return block[s.size()] + v;
  };

  constexpr std::size_t kWords = (9841 + 63) / 64;
  if (n != 9841) return {false, "enumeration produced " + std::to_string(n) + " sequences"};
  std::vector<std::array<std::uint64_t, kWords>> subs(n);
  for (std::size_t i = 0; i < n; ++i) {
    subs[i].fill(0);
    for (const auto& sub : oracle::subsequences(seqs[i])) {
      const std::size_t id = index_of(sub);
      subs[i][id / 64] |= std::uint64_t{1} << (id % 64);
    }
  }
  auto common_of_length = [&](std::size_t i, std::size_t j, std::size_t k) {
    const std::size_t lo = block[k];
    const std::size_t hi = block[k + 1];
    for (std::size_t w = lo / 64; w <= (hi - 1) / 64; ++w) {
      std::uint64_t m = subs[i][w] & subs[j][w];
      if (w == lo / 64) m &= ~std::uint64_t{0} << (lo % 64);
      if (w == (hi - 1) / 64 && hi % 64 != 0) m &= (std::uint64_t{1} << (hi % 64)) - 1;
      if (m) return true;
    }
    return false;
  };

  std::vector<Tokens> tokens(n);
  for (std::size_t i = 0; i < n; ++i) tokens[i] = oracle::tokens(seqs[i]);

  Check c;
  std::size_t pairs = 0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const double got = lcs_similarity(tokens[i], tokens[j]);
      // the oracle's length: the longest k with a shared subsequence.
      // Subsequence sets are closed downward, so the first k without one
      // ends the search.
      const std::size_t shorter = std::min(seqs[i].size(), seqs[j].size());
      std::size_t k = 0;
      while (k < shorter && common_of_length(i, j, k + 1)) ++k;
      const std::size_t longest = std::max(seqs[i].size(), seqs[j].size());
      const double want = longest == 0 ? 1.0 : static_cast<double>(k) / static_cast<double>(longest);
      if (got != want) c.expect(false, seqs[i] + "/" + seqs[j]);
      ++pairs;
    }
  }
  return c.done(std::to_string(pairs) + " pairs");
}

Outcome metric_spot_checks() {
  Check c;
  using T = Tokens;
  c.expect(order_errors(T{"a", "b", "c"}, T{"b", "a", "c"}) == 2, "order abc/bac");
  c.expect(order_errors(T{"a"}, T{"a", "b", "c"}) == 2, "order a/abc");
  const double s = lcs_similarity(T{"a", "b", "c"}, T{"a", "c"});
  c.expect(std::abs(s - 2.0 / 3.0) <= 1e-12, "lcs abc/ac");
  std::mt19937_64 rng(12);
  for (int k = 0; k < 1000; ++k) {
    const Plan r = oracle::random_plan(rng, 10, 6);
    const Plan g = oracle::random_plan(rng, 10, 6);
    c.expect(missing_actions(r.norms(), g.norms()) == extra_actions(g.norms(), r.norms()), "duality");
  }
  return c.done("4 spot values, 1000 duality pairs");
}

Outcome ltl_parser() {
  Check c;
  std::mt19937_64 rng(4);
  const std::vector<std::string> atoms = {"p", "q", "heat_water", "r2"};
  for (int k = 0; k < 1000; ++k) {
    const ltl::Formula f = oracle::random_formula(rng, 6, atoms);
    const std::string text = ltl::print(f);
    c.expect(ltl::parse(text) == f, "round trip " + text);
    c.expect(oracle::is_nnf(f.node()), "nnf " + text);
  }
  const auto v = ltl::validate("F(heat_water) & F(add_tea) & F(serve)");
  c.expect(v.ok(), "example formula rejected");
  if (v.ok()) {
    const auto props = ltl::extract_props(*v.formula);
    c.expect(props == std::vector<std::string>{"heat_water", "add_tea", "serve"}, "props " + join(props));
  }
  return c.done("1000 random formulas");
}

// Truth of a formula at every (trace, position) of the trace family, packed
// into one bitset.
constexpr std::size_t kSlots = 4 * 1 + 16 * 2 + 64 * 3;
using Table = std::bitset<kSlots>;

Outcome ltl_semantics() {
  using ltl::Formula;
  // All traces of length 1..3 over {a, b}.
  std::vector<oracle::Steps> steps;
  std::vector<ltl::Trace> traces;
  std::vector<std::size_t> slot0;  // slot of position 0 of each trace
  std::size_t slot = 0;
  for (std::size_t len = 1; len <= 3; ++len) {
    for (std::size_t code = 0; code < (std::size_t{1} << (2 * len)); ++code) {
      oracle::Steps s(len);
      std::vector<std::vector<std::string>> raw(len);
      for (std::size_t i = 0; i < len; ++i) {
        if (code >> (2 * i) & 1) s[i].insert("a"), raw[i].push_back("a");
        if (code >> (2 * i + 1) & 1) s[i].insert("b"), raw[i].push_back("b");
      }
      steps.push_back(s);
      traces.emplace_back(raw);
      slot0.push_back(slot);
      slot += len;
    }
  }

  // Oracle tables: depth <= 3 by the direct recursion, depth 4 by applying
  // the same definitions to the operand tables.
  auto table_of = [&](const Formula& f) {
    Table t;
    for (std::size_t k = 0; k < steps.size(); ++k) {
      for (std::size_t i = 0; i < steps[k].size(); ++i) t[slot0[k] + i] = oracle::holds(f.node(), steps[k], i);
    }
    return t;
  };
  auto combine = [&](ltl::Op op, const Table& x, const Table& y) {
    if (op == ltl::Op::And) return x & y;
    if (op == ltl::Op::Or) return x | y;
    Table t;
    for (std::size_t k = 0; k < steps.size(); ++k) {
      const std::size_t n = steps[k].size();
      const std::size_t b = slot0[k];
      for (std::size_t i = 0; i < n; ++i) {
        bool v = false;
        if (op == ltl::Op::Globally) {
          v = true;
          for (std::size_t j = i; j < n; ++j) v = v && x[b + j];
        } else if (op == ltl::Op::Eventually) {
          for (std::size_t j = i; j < n; ++j) v = v || x[b + j];
        } else {
          for (std::size_t j = i; j < n && !v; ++j) {
            bool prefix = true;
            for (std::size_t m = i; m < j; ++m) prefix = prefix && x[b + m];
            v = prefix && y[b + j];
          }
        }
        t[b + i] = v;
      }
    }
    return t;
  };

  // Formulas in NNF by depth: negation only over atoms.
  const Formula a = Formula::atom("a");
  const Formula b = Formula::atom("b");
  std::vector<Formula> level = {a, b};
  for (int depth = 2; depth <= 3; ++depth) {
    std::vector<Formula> next = {a, b, Formula::negate(a), Formula::negate(b)};
    for (const auto& x : level) {
      next.push_back(Formula::eventually(x));
      next.push_back(Formula::globally(x));
    }
    for (const auto& x : level) {
      for (const auto& y : level) {
        next.push_back(Formula::conj(x, y));
        next.push_back(Formula::disj(x, y));
        next.push_back(Formula::until(x, y));
      }
    }
    level = std::move(next);
  }
  std::vector<Table> tables;
  tables.reserve(level.size());
  for (const auto& f : level) tables.push_back(table_of(f));

  Check c;
  std::size_t formulas = 0;
  std::size_t evaluations = 0;
  auto check = [&](const Formula& f, const Table& want) {
    ++formulas;
    for (std::size_t k = 0; k < traces.size(); ++k) {
      ++evaluations;
      if (ltl::eval_trace(f, traces[k], 0) != want[slot0[k]]) {
        c.expect(false, ltl::print(f));
        return;
      }
    }
  };
  check(a, table_of(a));
  check(b, table_of(b));
  check(Formula::negate(a), table_of(Formula::negate(a)));
  check(Formula::negate(b), table_of(Formula::negate(b)));
  for (std::size_t x = 0; x < level.size(); ++x) {
    check(Formula::eventually(level[x]), combine(ltl::Op::Eventually, tables[x], tables[x]));
    check(Formula::globally(level[x]), combine(ltl::Op::Globally, tables[x], tables[x]));
  }
  for (std::size_t x = 0; x < level.size(); ++x) {
    for (std::size_t y = 0; y < level.size(); ++y) {
      check(Formula::conj(level[x], level[y]), combine(ltl::Op::And, tables[x], tables[y]));
      check(Formula::disj(level[x], level[y]), combine(ltl::Op::Or, tables[x], tables[y]));
      check(Formula::until(level[x], level[y]), combine(ltl::Op::Until, tables[x], tables[y]));
    }
  }
  return c.done(std::to_string(formulas) + " formulas x " + std::to_string(traces.size()) + " traces, " +
                std::to_string(evaluations) + " evaluations");
}

Outcome reprompt_contract() {
  Check c;
  {
    ScriptedBackend sb({}, {"F(p", "p & !p", "F(p)"});
    try {
      const Translation t = translate("t", FewShotStore::seed(), sb);
      c.expect(t.attempts == 3, "attempts " + std::to_string(t.attempts));
    } catch (const std::exception& e) {
      c.expect(false, std::string("threw ") + e.what());
    }
    c.expect(sb.translation_calls() == 3, "calls " + std::to_string(sb.translation_calls()));
  }
  {
    ScriptedBackend sb({}, {"F(p", "p & !p", "???"});
    bool failed = false;
    try {
      translate("t", FewShotStore::seed(), sb);
    } catch (const TranslationFailed&) {
      failed = true;
    }
    c.expect(failed, "no TranslationFailed");
    c.expect(sb.translation_calls() == 3, "calls " + std::to_string(sb.translation_calls()));
  }
  {
    ScriptedBackend sb({R"({"verdict":"keep"})"}, {"F(p", "p & !p", "???"});
    const Plan p = Plan::from_texts("t", {"boil water", "pour water", "serve"});
    const auto r = verify(p, "Boil water and serve", sb, {});
    c.expect(r.translation == TranslationStatus::Failed, "status " + std::string(to_string(r.translation)));
    const auto reqs = sb.judge_requests();
    c.expect(!reqs.empty(), "verifier did not run");
    for (const auto& q : reqs) c.expect(q.props.empty(), "props present after failed translation");
    c.expect(r.output.norms() == p.norms(), "output changed");
  }
  return c.done("3 calls on success, failure falls back to no-LTL");
}

Outcome convergence() {
  Check c;
  const Corpus corpus = load_corpus(kData + "/household/corpus.jsonl");
  RuleBackend rb(RuleDomain::load(kData + "/household/household_rules.json"));
  RuleBackend tea(RuleDomain::load(kData + "/tea/tea_rules.json"));
  KeepBackend keep;

  struct Case {
    Plan plan;
    std::string task;
    std::optional<std::string> ltl;
    Backend* rules;
  };
  std::vector<Case> cases;
  for (const auto& r : corpus.records) cases.push_back({r.generated, r.task, r.ltl, &rb});
  cases.push_back({Plan::from_texts("", {"check timer", "heat water", "prepare cup", "pour tea", "pour tea",
                                          "add sugar", "stir tea", "serve"}),
                   "Make a cup of tea with sugar", std::nullopt, &tea});
  std::mt19937_64 rng(7);
  for (int k = 0; k < 200; ++k) cases.push_back({oracle::random_plan(rng, 12, 6), "random", std::nullopt, &rb});

  for (const auto& cs : cases) {
    VerifyOptions opts;
    opts.formula = cs.ltl;
    const auto id = verify(cs.plan, cs.task, keep, {}, opts);
    c.expect(id.output.norms() == cs.plan.norms() && id.edits.empty(), "keep changed " + cs.task);
    const auto once = verify(cs.plan, cs.task, *cs.rules, {}, opts);
    const auto twice = verify(once.output, cs.task, *cs.rules, {}, opts);
    c.expect(twice.output == once.output, "not idempotent: " + cs.task);
  }

  // Moves the first action behind the second on every pass, forever.
  ScriptedBackend osc({R"({"verdict":"move","target_index":1})", R"({"verdict":"keep"})"}, {}, true);
  VerifierConfig cfg;
  cfg.max_passes = 4;
  cfg.ltl_enabled = false;
  const auto r = verify(Plan::from_texts("", {"a", "b"}), "swap", osc, cfg);
  c.expect(r.stop_reason == StopReason::Cap, "oscillation stop " + std::string(to_string(r.stop_reason)));
  c.expect(r.passes == 4, "oscillation passes " + std::to_string(r.passes));
  return c.done(std::to_string(cases.size()) + " plans, oscillation capped after " + std::to_string(r.passes) +
                " passes");
}

Outcome edit_replay() {
  Check c;
  std::mt19937_64 rng(8);
  for (int k = 0; k < 1000; ++k) {
    const Plan input = oracle::random_plan(rng, 10, 5);
    RandomBackend be(rng());
    VerifierConfig cfg;
    cfg.ltl_enabled = false;
    cfg.max_passes = 1 + static_cast<int>(k % 4);
    cfg.window = 1 + k % 7;
    const auto r = verify(input, "random", be, cfg);
    c.expect(replay(input, r.edits) == r.output, "replay mismatch at sequence " + std::to_string(k));
  }
  return c.done("1000 random edit sequences");
}

Outcome window_boundaries() {
  Check c;
  const Plan p = Plan::from_texts("", {"a", "b", "c", "d", "e", "f", "g", "h"});
  const Window first = window(p, 0, 5);
  const Window last = window(p, 7, 5);
  c.expect(first.prev.size() == 0 && first.next.size() == 5, "i=0");
  c.expect(last.prev.size() == 5 && last.next.size() == 0, "i=7");
  c.expect(VerifierConfig{}.window == 5, "default window");
  return c.done("i=0 " + std::to_string(first.prev.size()) + "/" + std::to_string(first.next.size()) + ", i=7 " +
                std::to_string(last.prev.size()) + "/" + std::to_string(last.next.size()) + ", default w=" +
                std::to_string(VerifierConfig{}.window));
}

Outcome ablation() {
  Check c;
  const Corpus corpus = load_corpus(kData + "/household/corpus.jsonl");
  RuleBackend rb(RuleDomain::load(kData + "/household/household_rules.json"));

  const auto t0 = std::chrono::steady_clock::now();
  const auto jobs = run_ablation(corpus, {}, rb);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  c.expect(secs < 10.0, "ablation took " + std::to_string(secs) + " s");
  c.expect(jobs.size() == 3, "job count");
  if (jobs.size() != 3) return c.done("");

  const auto again = run_ablation(corpus, {}, rb);
  c.expect(without_timestamp(jobs_to_json(corpus, jobs, "ablate", utc_timestamp())) ==
               without_timestamp(jobs_to_json(corpus, again, "ablate", "later")),
           "report.json not byte-stable");
  c.expect(jobs_to_csv(jobs) == jobs_to_csv(again), "summary.csv not byte-stable");

  for (const auto& job : jobs) {
    Recorder rec(rb);
    const auto rerun = run_job(corpus, job.config, rec);
    if (job.name == "no_verification") {
      c.expect(rec.judged().empty() && rec.translations() == 0, "no_verification called the backend");
      for (std::size_t k = 0; k < corpus.records.size(); ++k) {
        c.expect(rerun.records[k].report.output == corpus.records[k].generated, "plan changed");
      }
      const auto& in = job.input;
      const auto& out = job.output;
      c.expect(in.lcs == out.lcs && in.missing == out.missing && in.extra == out.extra && in.order == out.order,
               "no_verification aggregate differs from the input baseline");
    } else if (job.name == "no_ltl") {
      c.expect(!rec.judged().empty(), "no_ltl judged nothing");
      c.expect(rec.translations() == 0, "no_ltl translated");
      for (const auto& q : rec.judged()) c.expect(q.props.empty(), "no_ltl request carries props");
    } else {
      const bool some_props = std::any_of(rec.judged().begin(), rec.judged().end(),
                                          [](const JudgeRequest& q) { return !q.props.empty(); });
      c.expect(some_props, "full run never passed props");
    }
  }
  std::ostringstream d;
  d.precision(3);
  d << corpus.records.size() << " records, ablation in " << secs << " s";
  return c.done(d.str());
}

struct Criterion {
  int number;
  const char* name;
  double budget_s;  // 0 = no budget
  std::function<Outcome()> run;
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {1, "tea example regression", 1.0, tea_regression},
      {2, "lcs equals exhaustive subsequence oracle", 30.0, lcs_exhaustive},
      {3, "metric spot checks", 0.0, metric_spot_checks},
      {4, "ltl parser round trip and nnf", 0.0, ltl_parser},
      {5, "finite-trace semantics, exhaustive", 60.0, ltl_semantics},
      {6, "translation reprompt contract", 0.0, reprompt_contract},
      {7, "convergence and idempotence", 0.0, convergence},
      {8, "edit log replay", 0.0, edit_replay},
      {9, "window boundaries", 0.0, window_boundaries},
      {10, "ablation harness", 0.0, ablation},
  };
  int failed = 0;
  for (const auto& cr : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = cr.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (cr.budget_s > 0 && secs >= cr.budget_s) {
      o.ok = false;
      o.detail += " (over the " + std::to_string(static_cast<int>(cr.budget_s)) + " s budget)";
    }
    if (!o.ok) ++failed;
    std::printf("%s %2d %s: %s [%.2f s]\n", o.ok ? "PASS" : "FAIL", cr.number, cr.name, o.detail.c_str(), secs);
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
