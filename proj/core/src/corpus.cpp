#include "planverify/corpus.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <thread>

#include "json_io.hpp"

namespace planverify {

using nlohmann::json;

namespace {

struct BadRecord : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::vector<std::string> string_array(const json& j, const char* key) {
  if (!j.is_array()) throw BadRecord(std::string("'") + key + "' must be an array of strings");
  std::vector<std::string> out;
  for (const auto& v : j) {
    if (!v.is_string()) throw BadRecord(std::string("'") + key + "' must be an array of strings");
    out.push_back(v.get<std::string>());
  }
  return out;
}

std::size_t index_field(const json& e, const char* key) {
  auto it = e.find(key);
  if (it == e.end() || !it->is_number_unsigned()) {
    throw BadRecord(std::string("gold edit needs a non-negative integer '") + key + "'");
  }
  return it->get<std::size_t>();
}

Edit gold_edit(const json& e, const Normalizer& n) {
  if (!e.is_object()) throw BadRecord("gold edit must be an object");
  auto kind = e.find("kind");
  if (kind == e.end() || !kind->is_string()) throw BadRecord("gold edit needs a 'kind'");
  auto action_text = [&]() -> std::optional<std::string> {
    auto a = e.find("action");
    if (a == e.end()) return std::nullopt;
    if (!a->is_string()) throw BadRecord("gold edit 'action' must be a string");
    return a->get<std::string>();
  };
  const std::string k = kind->get<std::string>();
  if (k == "move") {
    return Edit::move(index_field(e, "from"), index_field(e, "to"), Action::from_text(action_text().value_or(""), n));
  }
  if (k == "insert" || k == "remove") {
    auto text = action_text();
    if (!text || text->empty()) throw BadRecord("gold " + k + " edit needs an 'action'");
    Action a = Action::from_text(*text, n);
    return k == "insert" ? Edit::insert(index_field(e, "index"), a) : Edit::remove(index_field(e, "index"), a);
  }
  throw BadRecord("unknown gold edit kind '" + k + "'");
}

CorpusRecord parse_record(std::string_view line, const Normalizer& n) {
  json j = json::parse(line, nullptr, false);
  if (j.is_discarded()) throw BadRecord("not valid JSON");
  if (!j.is_object()) throw BadRecord("record must be a JSON object");

  CorpusRecord r;
  auto id = j.find("id");
  if (id == j.end() || !id->is_string() || id->get<std::string>().empty()) {
    throw BadRecord("missing or empty 'id'");
  }
  r.id = id->get<std::string>();
  auto task = j.find("task");
  if (task == j.end() || !task->is_string()) throw BadRecord("missing 'task'");
  r.task = task->get<std::string>();
  auto gen = j.find("generated_plan");
  if (gen == j.end()) throw BadRecord("missing 'generated_plan'");
  r.generated = Plan::from_texts(r.task, string_array(*gen, "generated_plan"), n);

  if (auto ref = j.find("reference_plan"); ref != j.end() && !ref->is_null()) {
    r.reference = Plan::from_texts(r.task, string_array(*ref, "reference_plan"), n);
  }
  if (auto gold = j.find("gold_edits"); gold != j.end() && !gold->is_null()) {
    if (!gold->is_array()) throw BadRecord("'gold_edits' must be an array");
    EditLog log;
    for (const auto& e : *gold) log.push_back(gold_edit(e, n));
    r.gold_edits = std::move(log);
  }
  if (auto f = j.find("ltl"); f != j.end() && !f->is_null()) {
    if (!f->is_string()) throw BadRecord("'ltl' must be a string");
    r.ltl = f->get<std::string>();
  }
  return r;
}

}  // namespace

Corpus parse_corpus(std::string_view text, const std::string& source, const Normalizer& n) {
  Corpus c;
  c.source = source;
  std::set<std::string> ids;
  std::size_t lineno = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    const auto nl = text.find('\n', pos);
    const std::string_view line =
        text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() : nl + 1;
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;
    ++c.total;
    try {
      CorpusRecord r = parse_record(line, n);
      r.line = lineno;
      if (!ids.insert(r.id).second) throw BadRecord("duplicate id '" + r.id + "'");
      c.records.push_back(std::move(r));
    } catch (const BadRecord& e) {
      c.rejects.push_back({lineno, e.what()});
    }
  }
  if (c.total == 0) throw EmptyCorpus("corpus '" + source + "' has no records");
  return c;
}

Corpus load_corpus(const std::string& path, const Normalizer& n) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FileNotFound("corpus file '" + path + "' not found");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_corpus(buf.str(), path, n);
}

namespace {

RecordResult run_record(const CorpusRecord& rec, const JobConfig& cfg, Backend& backend) {
  RecordResult out;
  out.id = rec.id;
  if (cfg.reference_required && !rec.reference) {
    out.failed = true;
    out.error = "record has no reference_plan";
    return out;
  }
  try {
    VerifyOptions opts;
    opts.few_shot = cfg.few_shot;
    opts.formula = rec.ltl;
    out.report = verify(rec.generated, rec.task, backend, cfg.verifier, opts);
    if (rec.reference) {
      out.before = evaluate(*rec.reference, rec.generated);
      out.after = evaluate(*rec.reference, out.report.output);
    }
    if (rec.gold_edits) {
      out.f1 = match_edits(out.report.edits, *rec.gold_edits);
      if (out.after) out.after->f1 = out.f1->f1();
    }
  } catch (const std::exception& e) {
    out.failed = true;
    out.error = e.what();
  }
  return out;
}

void accumulate(MetricMeans& m, const MetricsReport& r) {
  ++m.plans;
  m.lcs += r.lcs_similarity;
  m.missing += static_cast<double>(r.missing_actions);
  m.extra += static_cast<double>(r.extra_actions);
  m.order += static_cast<double>(r.order_errors);
}

void finish(MetricMeans& m) {
  if (m.plans == 0) return;
  const auto n = static_cast<double>(m.plans);
  m.lcs /= n;
  m.missing /= n;
  m.extra /= n;
  m.order /= n;
}

}  // namespace

JobReport run_job(const Corpus& corpus, const JobConfig& cfg, Backend& backend) {
  cfg.verifier.validate();
  JobReport job;
  job.name = cfg.name;
  job.config = cfg;
  job.total = corpus.total;
  job.rejected = corpus.rejects.size();
  job.records.resize(corpus.records.size());

  std::size_t workers = cfg.jobs ? cfg.jobs : std::max(1u, std::thread::hardware_concurrency());
  workers = std::min(workers, std::max<std::size_t>(1, corpus.records.size()));
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < corpus.records.size(); i = next++) {
      job.records[i] = run_record(corpus.records[i], cfg, backend);
    }
  };
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
  }

  std::vector<const RecordResult*> by_id;
  for (const auto& r : job.records) by_id.push_back(&r);
  std::sort(by_id.begin(), by_id.end(), [](const RecordResult* a, const RecordResult* b) { return a->id < b->id; });
  F1Counts pooled;
  bool any_gold = false;
  for (const RecordResult* r : by_id) {
    if (r->failed) {
      ++job.failed;
      continue;
    }
    ++job.processed;
    job.backend_errors += r->report.backend_errors;
    job.network_errors += r->report.network_errors;
    job.judged += r->report.judged;
    if (r->before) accumulate(job.input, *r->before);
    if (r->after) accumulate(job.output, *r->after);
    if (r->f1) {
      pooled += *r->f1;
      any_gold = true;
    }
  }
  finish(job.input);
  finish(job.output);
  if (any_gold) job.f1 = pooled;
  return job;
}

std::vector<JobReport> run_ablation(const Corpus& corpus, const JobConfig& base, Backend& backend) {
  std::vector<JobReport> out;
  JobConfig full = base;
  full.name = "full";
  full.verifier.ltl_enabled = true;
  full.verifier.llm_verification_enabled = true;
  out.push_back(run_job(corpus, full, backend));

  JobConfig no_ltl = full;
  no_ltl.name = "no_ltl";
  no_ltl.verifier.ltl_enabled = false;
  out.push_back(run_job(corpus, no_ltl, backend));

  JobConfig no_verify = full;
  no_verify.name = "no_verification";
  no_verify.verifier.llm_verification_enabled = false;
  out.push_back(run_job(corpus, no_verify, backend));
  return out;
}

std::vector<JobReport> run_sweep(const Corpus& corpus, const JobConfig& base, Backend& backend,
                                 const std::vector<std::size_t>& windows) {
  std::vector<JobReport> out;
  for (std::size_t w : windows) {
    JobConfig c = base;
    c.name = "w=" + std::to_string(w);
    c.verifier.window = w;
    out.push_back(run_job(corpus, c, backend));
  }
  return out;
}

namespace {

json means_json(const MetricMeans& m) {
  return {{"plans", m.plans}, {"lcs", m.lcs}, {"missing", m.missing}, {"extra", m.extra}, {"order", m.order}};
}

json metrics_json(const std::optional<MetricsReport>& m) {
  if (!m) return nullptr;
  json j = {{"lcs", m->lcs_similarity},
            {"missing", m->missing_actions},
            {"extra", m->extra_actions},
            {"order", m->order_errors}};
  if (m->f1) j["f1"] = *m->f1;
  return j;
}

json f1_json(const F1Counts& c) {
  return {{"f1", c.f1()},
          {"precision", c.precision()},
          {"recall", c.recall()},
          {"matched", c.matched},
          {"predicted", c.predicted},
          {"gold", c.gold}};
}

std::string fixed(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  return buf;
}

}  // namespace

std::string jobs_to_json(const Corpus& corpus, const std::vector<JobReport>& jobs, const std::string& command,
                         const std::string& timestamp) {
  json j;
  j["schema"] = 1;
  j["command"] = command;
  j["generated_at"] = timestamp;
  j["corpus"] = {{"source", corpus.source}, {"total", corpus.total}, {"records", corpus.records.size()}};
  j["corpus"]["rejects"] = json::array();
  for (const auto& r : corpus.rejects) j["corpus"]["rejects"].push_back({{"line", r.line}, {"reason", r.reason}});

  j["configurations"] = json::array();
  for (const auto& job : jobs) {
    json cj;
    cj["configuration"] = job.name;
    cj["verifier"] = detail::config_json(job.config.verifier);
    cj["counts"] = {{"total", job.total},
                    {"processed", job.processed},
                    {"rejected", job.rejected},
                    {"failed", job.failed},
                    {"backend_errors", job.backend_errors}};
    cj["input"] = means_json(job.input);
    cj["output"] = means_json(job.output);
    cj["f1"] = job.f1 ? f1_json(*job.f1) : json(nullptr);
    cj["records"] = json::array();
    for (const auto& r : job.records) {
      json rj;
      rj["id"] = r.id;
      if (r.failed) {
        rj["status"] = "failed";
        rj["error"] = r.error;
        cj["records"].push_back(std::move(rj));
        continue;
      }
      rj["status"] = "ok";
      rj["passes"] = r.report.passes;
      rj["stop_reason"] = std::string(to_string(r.report.stop_reason));
      rj["translation"] = std::string(to_string(r.report.translation));
      rj["formula"] = r.report.formula ? json(*r.report.formula) : json(nullptr);
      rj["output"] = r.report.output.texts();
      rj["edits"] = json::array();
      for (const auto& e : r.report.edits) rj["edits"].push_back(detail::edit_json(e));
      rj["before"] = metrics_json(r.before);
      rj["after"] = metrics_json(r.after);
      rj["f1"] = r.f1 ? f1_json(*r.f1) : json(nullptr);
      rj["warnings"] = r.report.warnings;
      rj["backend_errors"] = r.report.backend_errors;
      cj["records"].push_back(std::move(rj));
    }
    j["configurations"].push_back(std::move(cj));
  }
  return detail::dump(j, 2) + "\n";
}

std::string jobs_to_csv(const std::vector<JobReport>& jobs) {
  std::string out = "configuration,plans,LCS,Missing,Extra,Order,F1\n";
  auto row = [&](const std::string& name, const MetricMeans& m, const std::optional<F1Counts>& f1) {
    out += name + "," + std::to_string(m.plans) + "," + fixed(m.lcs) + "," + fixed(m.missing) + "," +
           fixed(m.extra) + "," + fixed(m.order) + "," + (f1 ? fixed(f1->f1()) : std::string()) + "\n";
  };
  if (!jobs.empty()) row("input", jobs.front().input, std::nullopt);
  for (const auto& job : jobs) row(job.name, job.output, job.f1);
  return out;
}

void write_reports(const std::string& dir, const Corpus& corpus, const std::vector<JobReport>& jobs,
                   const std::string& command, const std::string& timestamp) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  auto write = [](const fs::path& p, const std::string& body) {
    std::ofstream out(p, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write '" + p.string() + "'");
    out << body;
  };
  write(fs::path(dir) / "report.json", jobs_to_json(corpus, jobs, command, timestamp));
  write(fs::path(dir) / "summary.csv", jobs_to_csv(jobs));
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace planverify
