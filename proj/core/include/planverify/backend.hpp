// backend.hpp - pluggable reasoning backends.
//
// A backend answers two kinds of questions: a verdict for one action in its
// window (judge) and a formula for a task description (complete).  All
// implementations here are safe to call from several threads at once.
#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <string>
#include <vector>

#include "planverify/judge.hpp"

namespace planverify {

class BackendError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The backend could not be reached (connection refused, DNS, HTTP 5xx...).
class NetworkError : public BackendError {
 public:
  using BackendError::BackendError;
};

class TimeoutError : public NetworkError {
 public:
  using NetworkError::NetworkError;
};

struct TranslationRequest {
  std::string task;
  std::string prompt;       // fully rendered few-shot prompt
  int attempt = 1;          // 1-based
  std::string previous;     // rejected answer of the previous attempt
  std::string diagnostic;   // why it was rejected
};

class Backend {
 public:
  virtual ~Backend() = default;
  /// Throws MalformedResponse when the answer is unusable, NetworkError when
  /// the backend cannot be reached.
  virtual JudgeDecision judge(const JudgeRequest& r) = 0;
  /// Raw formula text; validation is the caller's job.
  virtual std::string complete(const TranslationRequest& r) = 0;
  virtual std::string name() const = 0;
};

/// Offline translation: one F(...) conjunct per clause of the task, in
/// clause order.  "Heat water, add tea, serve" ->
/// "F(heat_water) & F(add_tea) & F(serve)".  Returns "" when no clause
/// survives normalization.
std::string heuristic_translation(std::string_view task);

/// Keeps every action.  Translates with heuristic_translation.
class KeepBackend final : public Backend {
 public:
  JudgeDecision judge(const JudgeRequest&) override { return JudgeDecision::keep("keep backend"); }
  std::string complete(const TranslationRequest& r) override { return heuristic_translation(r.task); }
  std::string name() const override { return "keep"; }
};

/// Replays canned responses.  Judge responses go through parse_decision, so
/// scripting invalid text exercises the malformed-response path.  Each
/// script is consumed in order; once exhausted it either cycles or keeps
/// returning its last entry.
class ScriptedBackend final : public Backend {
 public:
  ScriptedBackend(std::vector<std::string> judge_script, std::vector<std::string> translation_script = {},
                  bool cycle = false);

  /// Reads a script file: lines starting with "judge:" or "translate:"
  /// append to the respective script; blank lines and '#' comments are
  /// skipped.
  static std::unique_ptr<ScriptedBackend> from_file(const std::string& path, bool cycle = true);

  JudgeDecision judge(const JudgeRequest& r) override;
  std::string complete(const TranslationRequest& r) override;
  std::string name() const override { return "script"; }

  std::size_t judge_calls() const;
  std::size_t translation_calls() const;
  std::vector<JudgeRequest> judge_requests() const;
  std::vector<TranslationRequest> translation_requests() const;

 private:
  std::string next(std::vector<std::string>& script, std::size_t& cursor, std::string_view fallback);

  mutable std::mutex mu_;
  std::vector<std::string> judge_script_;
  std::vector<std::string> translation_script_;
  bool cycle_;
  std::size_t judge_cursor_ = 0;
  std::size_t translation_cursor_ = 0;
  std::vector<JudgeRequest> judge_log_;
  std::vector<TranslationRequest> translation_log_;
};

/// Forwards to another backend and records every request.
class RecordingBackend final : public Backend {
 public:
  explicit RecordingBackend(Backend& inner) : inner_(inner) {}

  JudgeDecision judge(const JudgeRequest& r) override;
  std::string complete(const TranslationRequest& r) override;
  std::string name() const override { return "recording(" + inner_.name() + ")"; }

  std::vector<JudgeRequest> judge_requests() const;
  std::vector<TranslationRequest> translation_requests() const;

 private:
  Backend& inner_;
  mutable std::mutex mu_;
  std::vector<JudgeRequest> judge_log_;
  std::vector<TranslationRequest> translation_log_;
};

/// Wraps an oracle backend and deterministically drops a fraction of its
/// edit verdicts (turning them into keep).  The fraction depends on the
/// window size seen in the request, so a window sweep over a fixed corpus
/// has a known best window.  Whether a given verdict is dropped is a pure
/// function of (seed, request), independent of call order.
class NoisyBackend final : public Backend {
 public:
  /// `accuracy_by_window` maps w to the probability an edit verdict is kept;
  /// windows not listed use `default_accuracy`.
  NoisyBackend(std::shared_ptr<Backend> oracle, std::map<std::size_t, double> accuracy_by_window,
               std::uint64_t seed, double default_accuracy = 1.0);

  /// Parses "3=0.9,5=1.0,7=0.9".
  static std::map<std::size_t, double> parse_accuracy(std::string_view spec);

  JudgeDecision judge(const JudgeRequest& r) override;
  std::string complete(const TranslationRequest& r) override { return oracle_->complete(r); }
  std::string name() const override { return "noisy(" + oracle_->name() + ")"; }

 private:
  std::shared_ptr<Backend> oracle_;
  std::map<std::size_t, double> accuracy_;
  std::uint64_t seed_;
  double default_accuracy_;
};

/// Stable 64-bit FNV-1a over the user-visible content of a request.
std::uint64_t request_fingerprint(const JudgeRequest& r, std::uint64_t seed);

}  // namespace planverify
