// judge.hpp - the per-action verification request, the verdict, and the
// prompt/response protocol spoken with reasoning backends.
#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "planverify/plan.hpp"

namespace planverify {

enum class Verdict { Keep, Remove, Move, Augment };

std::string_view to_string(Verdict v);
std::optional<Verdict> verdict_from_string(std::string_view s);

/// The context an action is judged in: the task, the propositions of the
/// task formula, up to `w` actions on either side, and everything before the
/// window.  `earlier` is not shown to language models; rule-based judges use
/// it to look for prerequisites outside the window.
struct JudgeRequest {
  std::string task;
  std::vector<std::string> props;
  std::vector<Action> earlier;
  std::vector<Action> prev;
  Action current;
  std::vector<Action> next;
  std::size_t index = 0;      // absolute index of `current`
  std::size_t plan_size = 0;
  std::size_t window = 0;     // configured w
  int attempt = 0;            // 0 on the first call, +1 per retry

  /// Absolute index of prev.front().
  std::size_t window_start() const noexcept { return index - prev.size(); }

  friend bool operator==(const JudgeRequest&, const JudgeRequest&) = default;
};

struct JudgeDecision {
  Verdict verdict = Verdict::Keep;
  std::optional<std::size_t> target_index;  // move only
  std::string new_action;                   // augment only
  std::string reasoning;

  static JudgeDecision keep(std::string reasoning = {});
  static JudgeDecision remove(std::string reasoning = {});
  static JudgeDecision move(std::size_t target, std::string reasoning = {});
  static JudgeDecision augment(std::string action, std::string reasoning = {});

  /// Payload invariants: move carries a target, augment a non-empty action,
  /// keep and remove carry neither.
  bool well_formed() const noexcept;

  friend bool operator==(const JudgeDecision&, const JudgeDecision&) = default;
};

/// The backend answer could not be turned into a well-formed decision.
class MalformedResponse : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Renders the verification prompt: input context (task, propositions,
/// action window), analysis criteria, and response format.
std::string build_prompt(const JudgeRequest& r);

/// Extracts the first JSON object embedded in `text` and validates it.
/// Throws MalformedResponse.
JudgeDecision parse_decision(std::string_view text);

/// Compact JSON encoding accepted by parse_decision.
std::string serialize_decision(const JudgeDecision& d);

}  // namespace planverify
