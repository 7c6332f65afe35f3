// verifier.hpp - the sliding-window verification engine.
//
// One pass walks the current plan left to right and asks the backend for a
// verdict on every action in its window.  Cursor rules:
//
//   keep     i + 1
//   remove   i stays (it now points at the following action)
//   augment  the new action is inserted before i; i + 2
//   move     i + 1 from the original position
//
// Passes repeat until one makes no edit or max_passes is reached.
#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "planverify/backend.hpp"
#include "planverify/judge.hpp"
#include "planverify/plan.hpp"
#include "planverify/translator.hpp"

namespace planverify {

struct VerifierConfig {
  std::size_t window = 5;
  int max_passes = 5;
  int retry_cap = 2;  // extra calls after a malformed response
  bool ltl_enabled = true;
  bool llm_verification_enabled = true;

  /// Throws std::invalid_argument.
  void validate() const;
};

struct Window {
  std::vector<Action> prev;
  Action current;
  std::vector<Action> next;
};

/// prev = [max(0, i-w), i), next = [i+1, min(n, i+1+w)).  Throws
/// IndexOutOfRange unless i < p.size().
Window window(const Plan& p, std::size_t i, std::size_t w);

struct DecisionRecord {
  int pass = 1;
  std::size_t index = 0;         // position of the judged action
  std::size_t window_begin = 0;  // [begin, end) of the visible window
  std::size_t window_end = 0;
  std::string action;
  JudgeDecision decision;
  int calls = 1;         // backend calls spent on this action
  bool defaulted = false;  // decision is a fallback keep
  std::string error;       // why it defaulted
};

struct PassResult {
  Plan plan;
  EditLog edits;
  std::vector<DecisionRecord> decisions;
  std::vector<std::string> warnings;
  std::size_t backend_errors = 0;   // defaulted decisions
  std::size_t network_errors = 0;   // subset caused by an unreachable backend
  std::size_t judged = 0;           // decisions obtained from the backend
};

/// One left-to-right pass.  Backend failures on a single action degrade to
/// keep and are recorded; they never abort the pass.
PassResult verify_pass(const Plan& p, const std::vector<std::string>& props, Backend& backend,
                       const VerifierConfig& cfg, int pass_number = 1);

enum class StopReason { Converged, Cap, Disabled };
std::string_view to_string(StopReason r);

enum class TranslationStatus { Ok, Provided, Failed, Disabled };
std::string_view to_string(TranslationStatus s);

struct VerificationReport {
  std::string task;
  std::string backend;
  VerifierConfig config;
  Plan input;
  Plan output;
  EditLog edits;
  int passes = 0;
  StopReason stop_reason = StopReason::Converged;
  std::vector<DecisionRecord> decisions;
  std::vector<std::string> warnings;
  std::size_t backend_errors = 0;
  std::size_t network_errors = 0;
  std::size_t judged = 0;

  TranslationStatus translation = TranslationStatus::Disabled;
  std::optional<std::string> formula;  // printed, when one was used
  int translation_attempts = 0;
  std::string translation_diagnostic;
  std::vector<std::string> props;
  std::optional<bool> trace_satisfied;  // formula on the output trace

  /// Every backend call failed to reach the backend.
  bool backend_unreachable() const noexcept { return network_errors > 0 && judged == 0; }
};

struct VerifyOptions {
  const FewShotStore* few_shot = nullptr;  // FewShotStore::seed() when null
  std::optional<std::string> formula;      // skips translation when it validates
};

/// Translates the task (unless disabled), then runs passes to a fixed point
/// or the pass cap.  Never throws on backend trouble; everything is
/// recorded in the report.
VerificationReport verify(const Plan& p, const std::string& task, Backend& backend, const VerifierConfig& cfg,
                          const VerifyOptions& opts = {});

/// JSON document with "schema": 1.
std::string report_to_json(const VerificationReport& r, int indent = 2);

}  // namespace planverify
