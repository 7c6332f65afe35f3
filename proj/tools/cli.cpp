#include "cli.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "planverify/backend.hpp"
#include "planverify/config.hpp"
#include "planverify/corpus.hpp"
#include "planverify/llm_backend.hpp"
#include "planverify/ltl.hpp"
#include "planverify/rules.hpp"
#include "planverify/translator.hpp"
#include "planverify/verifier.hpp"

namespace planverify::cli {

namespace {

using nlohmann::json;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

const std::set<std::string, std::less<>> kKnownKeys = {
    "window",       "max_passes",        "retry_cap",         "ltl_enabled",
    "llm_verification_enabled",          "jobs",              "backend",
    "few_shot",     "few_shot_k",        "stop_words",        "output_dir",
    "windows",      "noise",             "seed",              "endpoint.url",
    "endpoint.model", "endpoint.response_path", "endpoint.temperature", "endpoint.timeout_ms",
    "endpoint.retries", "endpoint.backoff_ms",
};

/// Merged view of config file, flags and environment.
struct Settings {
  VerifierConfig verifier;
  std::string backend = "keep";
  std::size_t jobs = 0;
  std::string few_shot;
  std::size_t few_shot_k = 3;
  std::optional<std::set<std::string>> stop_words;
  std::string output_dir = "planverify-out";
  std::vector<std::size_t> windows = {3, 5, 7};
  std::string noise = "3=0.9,5=1.0,7=0.9";
  std::uint64_t seed = 1;
  EndpointConfig endpoint;
  bool quiet = false;
  bool json = false;
};

std::size_t to_size(long long v, const char* key) {
  if (v < 0) throw ConfigError(std::string("'") + key + "' must be non-negative");
  return static_cast<std::size_t>(v);
}

std::vector<std::size_t> parse_windows(const std::vector<std::string>& items) {
  std::vector<std::size_t> out;
  for (const auto& s : items) {
    std::size_t used = 0;
    long long v = 0;
    try {
      v = std::stoll(s, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != s.size() || v < 1) throw ConfigError("window sizes must be positive integers, got '" + s + "'");
    out.push_back(static_cast<std::size_t>(v));
  }
  if (out.empty()) throw ConfigError("no window sizes given");
  return out;
}

std::vector<std::string> split_commas(const std::string& s) {
  ConfigFile tmp;
  tmp.set("x", s);
  return *tmp.get_list("x");
}

void apply_file(Settings& s, const ConfigFile& f) {
  f.require_known(kKnownKeys);
  if (auto v = f.get_int("window")) s.verifier.window = to_size(*v, "window");
  if (auto v = f.get_int("max_passes")) s.verifier.max_passes = static_cast<int>(*v);
  if (auto v = f.get_int("retry_cap")) s.verifier.retry_cap = static_cast<int>(*v);
  if (auto v = f.get_bool("ltl_enabled")) s.verifier.ltl_enabled = *v;
  if (auto v = f.get_bool("llm_verification_enabled")) s.verifier.llm_verification_enabled = *v;
  if (auto v = f.get_int("jobs")) s.jobs = to_size(*v, "jobs");
  if (auto v = f.get("backend")) s.backend = *v;
  if (auto v = f.get("few_shot")) s.few_shot = *v;
  if (auto v = f.get_int("few_shot_k")) s.few_shot_k = to_size(*v, "few_shot_k");
  if (auto v = f.get_list("stop_words")) s.stop_words = std::set<std::string>(v->begin(), v->end());
  if (auto v = f.get("output_dir")) s.output_dir = *v;
  if (auto v = f.get_list("windows")) s.windows = parse_windows(*v);
  if (auto v = f.get("noise")) s.noise = *v;
  if (auto v = f.get_int("seed")) s.seed = static_cast<std::uint64_t>(*v);
  if (auto v = f.get("endpoint.url")) s.endpoint.url = *v;
  if (auto v = f.get("endpoint.model")) s.endpoint.model = *v;
  if (auto v = f.get("endpoint.response_path")) s.endpoint.response_path = *v;
  if (auto v = f.get_double("endpoint.temperature")) s.endpoint.temperature = *v;
  if (auto v = f.get_int("endpoint.timeout_ms")) s.endpoint.timeout_ms = static_cast<int>(*v);
  if (auto v = f.get_int("endpoint.retries")) s.endpoint.retries = static_cast<int>(*v);
  if (auto v = f.get_int("endpoint.backoff_ms")) s.endpoint.backoff_ms = static_cast<int>(*v);
}

std::shared_ptr<Backend> make_backend(const Settings& s) {
  const std::string& spec = s.backend;
  auto arg = [&](std::string_view prefix) -> std::optional<std::string> {
    if (!spec.starts_with(prefix)) return std::nullopt;
    std::string rest = spec.substr(prefix.size());
    if (rest.empty()) throw UsageError("backend '" + spec + "' needs a path");
    return rest;
  };
  if (spec == "keep") return std::make_shared<KeepBackend>();
  if (auto path = arg("rules:")) return std::make_shared<RuleBackend>(RuleDomain::load(*path));
  if (auto path = arg("noisy:")) {
    auto oracle = std::make_shared<RuleBackend>(RuleDomain::load(*path));
    return std::make_shared<NoisyBackend>(oracle, NoisyBackend::parse_accuracy(s.noise), s.seed);
  }
  if (auto path = arg("script:")) {
    std::shared_ptr<Backend> b = ScriptedBackend::from_file(*path);
    return b;
  }
  if (spec == "llm") {
    EndpointConfig ep = s.endpoint;
    if (const char* key = std::getenv(kApiKeyEnv)) ep.api_key = key;
    try {
      return std::make_shared<LlmBackend>(ep);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
  }
  throw UsageError("unknown backend '" + spec + "' (expected keep, rules:PATH, noisy:PATH, script:PATH or llm)");
}

FewShotStore load_few_shot(const Settings& s) {
  FewShotStore store = s.few_shot.empty() ? FewShotStore::seed() : FewShotStore::load_jsonl(s.few_shot);
  store.set_k(s.few_shot_k);
  return store;
}

Normalizer make_normalizer(const Settings& s) {
  return s.stop_words ? Normalizer(*s.stop_words) : Normalizer();
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot read '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

struct PlanFile {
  std::string task;
  std::vector<std::string> actions;
  std::optional<std::string> ltl;
};

/// JSON {"task", "plan", "ltl"}, a JSON array of actions, or one action per
/// line ('#' starts a comment line).
PlanFile load_plan_file(const std::string& path) {
  const std::string text = read_file(path);
  PlanFile pf;
  json j = json::parse(text, nullptr, false);
  if (!j.is_discarded()) {
    const json* arr = &j;
    if (j.is_object()) {
      if (auto t = j.find("task"); t != j.end() && t->is_string()) pf.task = t->get<std::string>();
      if (auto l = j.find("ltl"); l != j.end() && l->is_string()) pf.ltl = l->get<std::string>();
      auto p = j.find("plan");
      if (p == j.end()) throw UsageError("'" + path + "' has no \"plan\" array");
      arr = &*p;
    }
    if (!arr->is_array()) throw UsageError("'" + path + "': plan must be an array of strings");
    for (const auto& a : *arr) {
      if (!a.is_string()) throw UsageError("'" + path + "': plan must be an array of strings");
      pf.actions.push_back(a.get<std::string>());
    }
    return pf;
  }
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    const auto b = line.find_first_not_of(" \t\r");
    if (b == std::string::npos || line[b] == '#') continue;
    const auto e = line.find_last_not_of(" \t\r");
    pf.actions.push_back(line.substr(b, e - b + 1));
  }
  return pf;
}

/// Line diff of two plans aligned on normalized actions.
std::string plan_diff(const Plan& before, const Plan& after) {
  const auto a = before.norms();
  const auto b = after.norms();
  std::vector<std::vector<std::size_t>> dp(a.size() + 1, std::vector<std::size_t>(b.size() + 1, 0));
  for (std::size_t i = a.size(); i-- > 0;) {
    for (std::size_t j = b.size(); j-- > 0;) {
      dp[i][j] = a[i] == b[j] ? dp[i + 1][j + 1] + 1 : std::max(dp[i + 1][j], dp[i][j + 1]);
    }
  }
  std::string out;
  std::size_t i = 0;
  std::size_t j = 0;
  while (i < a.size() || j < b.size()) {
    if (i < a.size() && j < b.size() && a[i] == b[j]) {
      out += "  " + after.actions[j].raw + "\n";
      ++i;
      ++j;
    } else if (j < b.size() && (i == a.size() || dp[i][j + 1] >= dp[i + 1][j])) {
      out += "+ " + after.actions[j].raw + "\n";
      ++j;
    } else {
      out += "- " + before.actions[i].raw + "\n";
      ++i;
    }
  }
  return out;
}

bool unreachable(const std::vector<JobReport>& jobs) {
  std::size_t network = 0;
  std::size_t judged = 0;
  for (const auto& j : jobs) {
    network += j.network_errors;
    judged += j.judged;
  }
  return network > 0 && judged == 0;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Verify and repair household task plans with LTL-guided sliding-window judging", "planverify"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_version_flag("--version", "planverify 0.1.0");

  std::string config_path;
  std::uint64_t seed = 0;
  bool quiet = false;
  bool as_json = false;
  app.add_option("--config", config_path, "Flat key = value configuration file");
  auto* seed_opt = app.add_option("--seed", seed, "Seed for randomized backends");
  app.add_flag("--quiet,-q", quiet, "Only print results and errors");
  app.add_flag("--json", as_json, "Machine-readable output on stdout");

  // Options shared by several subcommands.
  std::string backend;
  std::size_t window = 0;
  int max_passes = 0;
  std::string few_shot;
  std::string out_dir;
  std::size_t jobs = 0;
  std::string noise;

  auto add_verifier_flags = [&](CLI::App* sub) {
    sub->add_option("--backend,-b", backend, "keep | rules:PATH | noisy:PATH | script:PATH | llm");
    sub->add_option("--window,-w", window, "Context window on each side")->check(CLI::PositiveNumber);
    sub->add_option("--max-passes", max_passes, "Pass cap")->check(CLI::PositiveNumber);
    sub->add_option("--few-shot", few_shot, "Few-shot examples (JSONL)");
    sub->add_option("--noise", noise, "Accuracy per window for noisy:, e.g. 3=0.9,5=1.0,7=0.9");
  };

  // translate
  auto* translate_cmd = app.add_subcommand("translate", "Translate a task description into LTL");
  std::string task_text;
  std::string task_file;
  translate_cmd->add_option("task", task_text, "Task description");
  translate_cmd->add_option("--file,-f", task_file, "Read the task description from a file");
  translate_cmd->add_option("--backend,-b", backend, "Backend used for translation");
  translate_cmd->add_option("--few-shot", few_shot, "Few-shot examples (JSONL)");

  // verify
  auto* verify_cmd = app.add_subcommand("verify", "Verify and repair one plan");
  std::string plan_path;
  std::string verify_task;
  std::string report_path;
  std::string ltl_text;
  bool no_ltl = false;
  bool no_verify = false;
  verify_cmd->add_option("plan", plan_path, "Plan file: JSON {task, plan, ltl}, JSON array, or one action per line")
      ->required();
  verify_cmd->add_option("--task,-t", verify_task, "Task description (overrides the plan file)");
  verify_cmd->add_option("--ltl", ltl_text, "Use this formula instead of translating the task");
  verify_cmd->add_option("--report,-r", report_path, "Write the verification report here");
  verify_cmd->add_flag("--no-ltl", no_ltl, "Skip LTL translation");
  verify_cmd->add_flag("--no-verify", no_verify, "Skip verification passes");
  add_verifier_flags(verify_cmd);

  // eval / ablate / sweep
  std::string corpus_path;
  bool reference_required = false;
  std::string windows_text;
  auto add_corpus_cmd = [&](const char* name, const char* help) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("corpus", corpus_path, "Corpus (JSONL)")->required();
    sub->add_option("--out,-o", out_dir, "Directory for report.json and summary.csv");
    sub->add_option("--jobs,-j", jobs, "Worker threads (0 = all cores)");
    add_verifier_flags(sub);
    return sub;
  };
  auto* eval_cmd = add_corpus_cmd("eval", "Verify a corpus and report plan metrics");
  eval_cmd->add_flag("--reference-required", reference_required, "Fail records without a reference plan");
  eval_cmd->add_flag("--no-ltl", no_ltl, "Skip LTL translation");
  eval_cmd->add_flag("--no-verify", no_verify, "Skip verification passes");
  auto* ablate_cmd = add_corpus_cmd("ablate", "Run full, no-LTL and no-verification configurations");
  auto* sweep_cmd = add_corpus_cmd("sweep", "Run the corpus once per window size and report F1");
  sweep_cmd->add_option("--windows", windows_text, "Comma-separated window sizes, e.g. 3,5,7");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(std::move(reversed));
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    Settings s;
    if (!config_path.empty()) apply_file(s, ConfigFile::load(config_path));
    if (*seed_opt) s.seed = seed;
    s.quiet = quiet;
    s.json = as_json;
    if (!backend.empty()) s.backend = backend;
    if (window) s.verifier.window = window;
    if (max_passes) s.verifier.max_passes = max_passes;
    if (!few_shot.empty()) s.few_shot = few_shot;
    if (!out_dir.empty()) s.output_dir = out_dir;
    if (jobs) s.jobs = jobs;
    if (!noise.empty()) s.noise = noise;
    if (!windows_text.empty()) s.windows = parse_windows(split_commas(windows_text));
    if (no_ltl) s.verifier.ltl_enabled = false;
    if (no_verify) s.verifier.llm_verification_enabled = false;
    s.verifier.validate();

    if (translate_cmd->parsed()) {
      std::string task = task_text;
      if (!task_file.empty()) task = read_file(task_file);
      if (task.find_first_not_of(" \t\r\n") == std::string::npos) {
        throw UsageError("translate needs a non-empty task description (argument or --file)");
      }
      auto be = make_backend(s);
      const FewShotStore store = load_few_shot(s);
      try {
        Translation t = translate(task, store, *be);
        const std::string formula = ltl::print_bare(t.formula);
        if (s.json) {
          json j = {{"formula", formula}, {"props", ltl::extract_props(t.formula)}, {"attempts", t.attempts}};
          out << j.dump() << "\n";
        } else {
          out << formula << "\n";
        }
        return kOk;
      } catch (const TranslationFailed& e) {
        err << "error: " << e.what() << "\n";
        return kTranslationFailed;
      }
    }

    if (verify_cmd->parsed()) {
      PlanFile pf = load_plan_file(plan_path);
      const std::string task = verify_task.empty() ? pf.task : verify_task;
      auto be = make_backend(s);
      const FewShotStore store = load_few_shot(s);
      const Normalizer norm = make_normalizer(s);
      VerifyOptions opts;
      opts.few_shot = &store;
      opts.formula = ltl_text.empty() ? pf.ltl : std::optional<std::string>(ltl_text);
      const Plan plan = Plan::from_texts(task, pf.actions, norm);
      const VerificationReport rep = verify(plan, task, *be, s.verifier, opts);
      const std::string body = report_to_json(rep) + "\n";
      if (!report_path.empty()) {
        std::ofstream f(report_path, std::ios::binary);
        if (!f) throw UsageError("cannot write report '" + report_path + "'");
        f << body;
      }
      if (s.json) {
        out << body;
      } else if (!s.quiet) {
        out << plan_diff(rep.input, rep.output);
        out << rep.edits.size() << " edit(s), " << rep.passes << " pass(es), " << to_string(rep.stop_reason);
        if (rep.formula) out << ", formula " << *rep.formula;
        if (rep.trace_satisfied) out << (*rep.trace_satisfied ? " (satisfied)" : " (violated)");
        if (!report_path.empty()) out << "; report " << report_path;
        out << "\n";
        for (const auto& w : rep.warnings) err << "warning: " << w << "\n";
      }
      if (rep.backend_unreachable()) {
        err << "error: backend unreachable\n";
        return kBackendUnreachable;
      }
      return kOk;
    }

    // Corpus commands.
    const Normalizer norm = make_normalizer(s);
    const Corpus corpus = load_corpus(corpus_path, norm);
    auto be = make_backend(s);
    const FewShotStore store = load_few_shot(s);
    JobConfig jc;
    jc.verifier = s.verifier;
    jc.jobs = s.jobs;
    jc.few_shot = &store;
    jc.reference_required = reference_required;

    std::vector<JobReport> reports;
    std::string command;
    if (eval_cmd->parsed()) {
      command = "eval";
      reports.push_back(run_job(corpus, jc, *be));
    } else if (ablate_cmd->parsed()) {
      command = "ablate";
      reports = run_ablation(corpus, jc, *be);
    } else {
      command = "sweep";
      reports = run_sweep(corpus, jc, *be, s.windows);
    }
    const std::string stamp = utc_timestamp();
    write_reports(s.output_dir, corpus, reports, command, stamp);
    if (s.json) {
      out << jobs_to_json(corpus, reports, command, stamp);
    } else if (!s.quiet) {
      out << jobs_to_csv(reports);
      for (const auto& r : corpus.rejects) err << "warning: line " << r.line << " rejected: " << r.reason << "\n";
      for (const auto& job : reports) {
        for (const auto& rec : job.records) {
          if (rec.failed) err << "warning: [" << job.name << "] " << rec.id << " failed: " << rec.error << "\n";
        }
      }
      out << "reports written to " << s.output_dir << "\n";
    }
    if (unreachable(reports)) {
      err << "error: backend unreachable\n";
      return kBackendUnreachable;
    }
    return kOk;
  } catch (const NetworkError& e) {
    err << "error: " << e.what() << "\n";
    return kBackendUnreachable;
  } catch (const TranslationFailed& e) {
    err << "error: " << e.what() << "\n";
    return kTranslationFailed;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  }
}

}  // namespace planverify::cli
