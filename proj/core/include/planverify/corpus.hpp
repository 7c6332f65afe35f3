// corpus.hpp - JSONL plan corpora and batch jobs over them.
//
// One record per line:
//
//   {"id": "tea", "task": "Make tea",
//    "generated_plan": ["check timer", ...],
//    "reference_plan": [...],                      optional
//    "gold_edits": [{"kind": "insert", "index": 3, "action": "add tea bag"},
//                   {"kind": "remove", "index": 8, "action": "pour tea"},
//                   {"kind": "move", "from": 2, "to": 3}],   optional
//    "ltl": "F(heat_water) & F(serve)"}           optional
#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "planverify/backend.hpp"
#include "planverify/metrics.hpp"
#include "planverify/plan.hpp"
#include "planverify/translator.hpp"
#include "planverify/verifier.hpp"

namespace planverify {

class FileNotFound : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class EmptyCorpus : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct CorpusRecord {
  std::string id;
  std::string task;
  Plan generated;
  std::optional<Plan> reference;
  std::optional<EditLog> gold_edits;
  std::optional<std::string> ltl;
  std::size_t line = 0;  // 1-based line in the source file
};

struct Reject {
  std::size_t line = 0;
  std::string reason;
};

struct Corpus {
  std::string source;
  std::vector<CorpusRecord> records;
  std::vector<Reject> rejects;
  std::size_t total = 0;  // non-blank lines
};

/// Malformed lines and duplicate ids become rejects.  Throws EmptyCorpus
/// when there is no non-blank line.
Corpus parse_corpus(std::string_view text, const std::string& source = "<corpus>",
                    const Normalizer& n = Normalizer::standard());
/// Throws FileNotFound, EmptyCorpus.
Corpus load_corpus(const std::string& path, const Normalizer& n = Normalizer::standard());

struct JobConfig {
  std::string name = "full";
  VerifierConfig verifier;
  std::size_t jobs = 0;  // worker threads; 0 = hardware concurrency
  const FewShotStore* few_shot = nullptr;
  bool reference_required = false;
};

struct RecordResult {
  std::string id;
  bool failed = false;
  std::string error;
  VerificationReport report;
  std::optional<MetricsReport> before;  // reference vs generated
  std::optional<MetricsReport> after;   // reference vs verified output
  std::optional<F1Counts> f1;           // predicted vs gold edits
};

struct MetricMeans {
  std::size_t plans = 0;
  double lcs = 0.0;
  double missing = 0.0;
  double extra = 0.0;
  double order = 0.0;
};

struct JobReport {
  std::string name;
  JobConfig config;
  std::vector<RecordResult> records;  // corpus order
  std::size_t processed = 0;
  std::size_t failed = 0;
  std::size_t rejected = 0;
  std::size_t total = 0;
  MetricMeans input;   // generated plans
  MetricMeans output;  // verified plans
  std::optional<F1Counts> f1;  // pooled over records with gold edits
  std::size_t backend_errors = 0;
  std::size_t network_errors = 0;
  std::size_t judged = 0;
};

/// Verifies every record and aggregates metrics.  Means are taken over
/// records sorted by id, so the result does not depend on record order.
JobReport run_job(const Corpus& corpus, const JobConfig& cfg, Backend& backend);

/// full, no_ltl and no_verification variants of `base`.
std::vector<JobReport> run_ablation(const Corpus& corpus, const JobConfig& base, Backend& backend);

/// One job per window size, named "w=<n>".
std::vector<JobReport> run_sweep(const Corpus& corpus, const JobConfig& base, Backend& backend,
                                 const std::vector<std::size_t>& windows);

/// report.json body.  `timestamp` goes into "generated_at", the only field
/// that differs between identical runs.
std::string jobs_to_json(const Corpus& corpus, const std::vector<JobReport>& jobs, const std::string& command,
                         const std::string& timestamp);

/// summary.csv: configuration,plans,LCS,Missing,Extra,Order,F1.  The first
/// row is the unverified input baseline.
std::string jobs_to_csv(const std::vector<JobReport>& jobs);

/// Writes report.json and summary.csv into `dir` (created if needed).
void write_reports(const std::string& dir, const Corpus& corpus, const std::vector<JobReport>& jobs,
                   const std::string& command, const std::string& timestamp);

/// UTC, ISO 8601.
std::string utc_timestamp();

}  // namespace planverify
