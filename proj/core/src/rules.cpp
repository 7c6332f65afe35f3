#include "planverify/rules.hpp"

#include <algorithm>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

#include "json.hpp"

namespace planverify {

using nlohmann::json;

RuleDomain::RuleDomain(std::map<std::string, Rule> rules) : rules_(rules.begin(), rules.end()) {
  // Depth-first cycle search over prerequisite edges.
  enum class Mark { None, Active, Done };
  std::map<std::string, Mark> mark;
  std::vector<std::string> path;
  std::function<void(const std::string&)> visit = [&](const std::string& node) {
    Mark& m = mark[node];
    if (m == Mark::Done) return;
    if (m == Mark::Active) {
      std::string cycle;
      auto start = std::find(path.begin(), path.end(), node);
      for (auto it = start; it != path.end(); ++it) cycle += *it + " -> ";
      throw DomainError("prerequisite cycle: " + cycle + node);
    }
    m = Mark::Active;
    path.push_back(node);
    if (auto it = rules_.find(node); it != rules_.end()) {
      for (const auto& pre : it->second.prerequisites) visit(pre);
    }
    path.pop_back();
    mark[node] = Mark::Done;
  };
  for (const auto& entry : rules_) visit(entry.first);
}

RuleDomain RuleDomain::from_json(std::string_view text) {
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded() || !j.is_object()) throw DomainError("rule domain is not a JSON object");
  auto rules_it = j.find("rules");
  if (rules_it == j.end() || !rules_it->is_object()) throw DomainError("rule domain lacks a 'rules' object");

  auto strings = [](const json& obj, const char* key, const std::string& owner) {
    std::vector<std::string> out;
    auto it = obj.find(key);
    if (it == obj.end()) return out;
    if (!it->is_array()) throw DomainError("'" + std::string(key) + "' of '" + owner + "' must be an array");
    for (const auto& v : *it) {
      if (!v.is_string()) throw DomainError("'" + std::string(key) + "' of '" + owner + "' must hold strings");
      out.push_back(normalize(v.get<std::string>()));
    }
    return out;
  };

  std::map<std::string, Rule> rules;
  for (const auto& [key, body] : rules_it->items()) {
    if (!body.is_object()) throw DomainError("rule '" + key + "' must be an object");
    Rule r;
    r.prerequisites = strings(body, "prerequisites", key);
    r.duplicates_of = strings(body, "duplicates_of", key);
    if (auto rank = body.find("order_rank"); rank != body.end() && !rank->is_null()) {
      if (!rank->is_number_integer()) throw DomainError("'order_rank' of '" + key + "' must be an integer");
      r.order_rank = rank->get<int>();
    }
    rules[normalize(key)] = std::move(r);
  }
  return RuleDomain(std::move(rules));
}

RuleDomain RuleDomain::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DomainError("cannot open rule domain '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return from_json(buf.str());
}

const Rule* RuleDomain::find(std::string_view norm) const {
  auto it = rules_.find(norm);
  return it == rules_.end() ? nullptr : &it->second;
}

namespace {

bool contains_norm(const std::vector<Action>& actions, std::string_view norm) {
  return std::any_of(actions.begin(), actions.end(), [&](const Action& a) { return a.norm == norm; });
}

}  // namespace

JudgeDecision RuleBackend::judge(const JudgeRequest& r) {
  const std::string& cur = r.current.norm;
  const Rule* rule = domain_.find(cur);
  if (rule == nullptr) return JudgeDecision::keep("no rule for '" + cur + "'");

  for (const auto& dup : rule->duplicates_of) {
    const bool before = contains_norm(r.earlier, dup) || contains_norm(r.prev, dup);
    if (dup == cur && before) {
      return JudgeDecision::remove("'" + cur + "' already occurs earlier in the plan");
    }
    if (dup != cur && (before || contains_norm(r.next, dup))) {
      return JudgeDecision::remove("'" + cur + "' is made redundant by '" + dup + "'");
    }
  }

  for (const auto& pre : rule->prerequisites) {
    if (!contains_norm(r.earlier, pre) && !contains_norm(r.prev, pre)) {
      return JudgeDecision::augment(display_text(pre), "prerequisite '" + pre + "' of '" + cur + "' is missing");
    }
  }

  if (rule->order_rank) {
    std::optional<std::size_t> last_lower;
    for (std::size_t k = 0; k < r.next.size(); ++k) {
      const Rule* other = domain_.find(r.next[k].norm);
      if (other && other->order_rank && *other->order_rank < *rule->order_rank) last_lower = k;
    }
    if (last_lower) {
      // After removing the current action the lower-ranked one sits at
      // index + k; inserting at index + k + 1 places us right after it.
      const std::size_t target = r.index + *last_lower + 1;
      return JudgeDecision::move(target, "'" + cur + "' must follow '" + r.next[*last_lower].norm + "'");
    }
  }

  return JudgeDecision::keep("all rules for '" + cur + "' satisfied");
}

}  // namespace planverify
