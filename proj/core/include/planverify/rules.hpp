// rules.hpp - declarative prerequisite / duplicate / order rules and the
// deterministic judge built on them.
//
// File format (JSON):
//
//   { "rules": { "<norm_action>": { "prerequisites": [...],
//                                   "duplicates_of": [...],
//                                   "order_rank": 3 } } }
//
// All names are normalized action tokens.  Every field is optional.
#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "planverify/backend.hpp"

namespace planverify {

class DomainError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Rule {
  std::vector<std::string> prerequisites;  // must appear earlier in the plan
  std::vector<std::string> duplicates_of;  // actions that make this one redundant
  std::optional<int> order_rank;

  friend bool operator==(const Rule&, const Rule&) = default;
};

class RuleDomain {
 public:
  RuleDomain() = default;
  /// Throws DomainError if the prerequisite graph has a cycle.
  explicit RuleDomain(std::map<std::string, Rule> rules);

  static RuleDomain from_json(std::string_view text);
  static RuleDomain load(const std::string& path);

  const Rule* find(std::string_view norm) const;
  const std::map<std::string, Rule, std::less<>>& rules() const noexcept { return rules_; }
  std::size_t size() const noexcept { return rules_.size(); }

 private:
  std::map<std::string, Rule, std::less<>> rules_;
};

/// Judges with a RuleDomain.  Verdicts, first match wins:
///
///   remove   the current action is redundant: an identical action listed in
///            duplicates_of occurs earlier in the plan, or a different action
///            listed there occurs anywhere in the visible context;
///   augment  the first prerequisite not present earlier in the plan;
///   move     the current action outranks the last lower-ranked action in the
///            next window; the target puts it right after that action;
///   keep     otherwise, including actions without rules.
class RuleBackend final : public Backend {
 public:
  explicit RuleBackend(RuleDomain domain) : domain_(std::move(domain)) {}

  JudgeDecision judge(const JudgeRequest& r) override;
  std::string complete(const TranslationRequest& r) override { return heuristic_translation(r.task); }
  std::string name() const override { return "rules"; }

  const RuleDomain& domain() const noexcept { return domain_; }

 private:
  RuleDomain domain_;
};

}  // namespace planverify
