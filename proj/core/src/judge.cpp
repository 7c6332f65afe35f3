#include "planverify/judge.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

#include "json.hpp"

namespace planverify {

using nlohmann::json;

std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::Keep: return "keep";
    case Verdict::Remove: return "remove";
    case Verdict::Move: return "move";
    case Verdict::Augment: return "augment";
  }
  return "keep";
}

std::optional<Verdict> verdict_from_string(std::string_view s) {
  if (s == "keep") return Verdict::Keep;
  if (s == "remove") return Verdict::Remove;
  if (s == "move") return Verdict::Move;
  if (s == "augment") return Verdict::Augment;
  return std::nullopt;
}

JudgeDecision JudgeDecision::keep(std::string reasoning) {
  return JudgeDecision{Verdict::Keep, std::nullopt, {}, std::move(reasoning)};
}
JudgeDecision JudgeDecision::remove(std::string reasoning) {
  return JudgeDecision{Verdict::Remove, std::nullopt, {}, std::move(reasoning)};
}
JudgeDecision JudgeDecision::move(std::size_t target, std::string reasoning) {
  return JudgeDecision{Verdict::Move, target, {}, std::move(reasoning)};
}
JudgeDecision JudgeDecision::augment(std::string action, std::string reasoning) {
  return JudgeDecision{Verdict::Augment, std::nullopt, std::move(action), std::move(reasoning)};
}

bool JudgeDecision::well_formed() const noexcept {
  switch (verdict) {
    case Verdict::Keep:
    case Verdict::Remove: return !target_index && new_action.empty();
    case Verdict::Move: return target_index.has_value() && new_action.empty();
    case Verdict::Augment: return !target_index && !new_action.empty();
  }
  return false;
}

namespace {

std::string json_quoted(std::string_view s) {
  return json(std::string(s)).dump(-1, ' ', false, json::error_handler_t::replace);
}

void render_actions(std::ostringstream& os, const std::vector<Action>& actions, std::size_t first_index) {
  if (actions.empty()) {
    os << "  (none)\n";
    return;
  }
  for (std::size_t k = 0; k < actions.size(); ++k) {
    os << "  [" << first_index + k << "] " << json_quoted(actions[k].raw) << "\n";
  }
}

}  // namespace

std::string build_prompt(const JudgeRequest& r) {
  std::ostringstream os;
  os << "You are verifying a household robot task plan before it is executed.\n"
        "Judge only the CURRENT action, using the surrounding actions as context.\n\n";

  os << "## Input Context\n";
  os << "Task: " << json_quoted(r.task) << "\n";
  os << "Atomic propositions (from the task's LTL formula): ";
  if (r.props.empty()) {
    os << "(not provided)\n";
  } else {
    os << json(r.props).dump(-1, ' ', false, json::error_handler_t::replace) << "\n";
  }
  os << "Plan length: " << r.plan_size << "\n";
  os << "Previous actions:\n";
  render_actions(os, r.prev, r.window_start());
  os << "Current action:\n";
  os << "  [" << r.index << "] " << json_quoted(r.current.raw) << "\n";
  os << "Next actions:\n";
  render_actions(os, r.next, r.index + 1);

  os << "\n## Analysis Criteria\n"
        "1. Position optimality: does the current action appear at the right point of the sequence?\n"
        "2. Necessity: is the current action essential for the task, or does it duplicate another step?\n"
        "3. Prerequisite completeness: is every action that must happen before it already present earlier?\n"
        "4. Compatibility: is the action consistent with the atomic propositions and their temporal order?\n";

  os << "\n## Response Format\n"
        "Answer with exactly one JSON object:\n"
        "{\"verdict\": \"keep\" | \"remove\" | \"move\" | \"augment\", "
        "\"target_index\": <integer, move only>, "
        "\"new_action\": <string, augment only>, "
        "\"reasoning\": <string>}\n"
        "- keep: the action is correct where it is.\n"
        "- remove: the action is redundant and should be deleted.\n"
        "- move: the action belongs at absolute position target_index, counted after removing it "
        "from its current position.\n"
        "- augment: a prerequisite is missing; new_action is inserted immediately before the current "
        "action.\n";
  if (r.attempt > 0) {
    os << "\nRetry " << r.attempt
       << ": the previous answer was not a valid JSON object of this form. Reply with the JSON object only.\n";
  }
  return os.str();
}

namespace {

/// Returns the end (one past the closing brace) of the balanced object
/// starting at `open`, or npos.
std::size_t match_object(std::string_view text, std::size_t open) {
  int depth = 0;
  bool in_string = false;
  bool escaped = false;
  for (std::size_t i = open; i < text.size(); ++i) {
    const char c = text[i];
    if (in_string) {
      if (escaped) {
        escaped = false;
      } else if (c == '\\') {
        escaped = true;
      } else if (c == '"') {
        in_string = false;
      }
      continue;
    }
    if (c == '"') {
      in_string = true;
    } else if (c == '{') {
      ++depth;
    } else if (c == '}') {
      if (--depth == 0) return i + 1;
    }
  }
  return std::string_view::npos;
}

std::optional<json> first_object(std::string_view text) {
  for (std::size_t open = text.find('{'); open != std::string_view::npos; open = text.find('{', open + 1)) {
    const std::size_t end = match_object(text, open);
    if (end == std::string_view::npos) continue;
    json j = json::parse(text.substr(open, end - open), nullptr, false);
    if (!j.is_discarded() && j.is_object()) return j;
  }
  return std::nullopt;
}

}  // namespace

JudgeDecision parse_decision(std::string_view text) {
  auto obj = first_object(text);
  if (!obj) throw MalformedResponse("no JSON object in response");
  const json& j = *obj;

  auto v = j.find("verdict");
  if (v == j.end() || !v->is_string()) throw MalformedResponse("missing string field 'verdict'");
  // models like to shout
  std::string word = v->get<std::string>();
  std::erase_if(word, [](unsigned char c) { return std::isspace(c); });
  std::transform(word.begin(), word.end(), word.begin(), [](unsigned char c) { return std::tolower(c); });
  auto verdict = verdict_from_string(word);
  if (!verdict) throw MalformedResponse("unknown verdict '" + v->get<std::string>() + "'");

  JudgeDecision d;
  d.verdict = *verdict;
  if (auto r = j.find("reasoning"); r != j.end() && r->is_string()) d.reasoning = r->get<std::string>();

  if (d.verdict == Verdict::Move) {
    auto t = j.find("target_index");
    if (t == j.end() || !t->is_number_integer()) throw MalformedResponse("move without integer 'target_index'");
    const auto value = t->get<long long>();
    if (value < 0) throw MalformedResponse("negative 'target_index'");
    d.target_index = static_cast<std::size_t>(value);
  } else if (d.verdict == Verdict::Augment) {
    auto a = j.find("new_action");
    if (a == j.end() || !a->is_string() || a->get<std::string>().empty()) {
      throw MalformedResponse("augment without non-empty 'new_action'");
    }
    d.new_action = a->get<std::string>();
  }
  return d;
}

std::string serialize_decision(const JudgeDecision& d) {
  json j;
  j["verdict"] = std::string(to_string(d.verdict));
  if (d.target_index) j["target_index"] = *d.target_index;
  if (!d.new_action.empty()) j["new_action"] = d.new_action;
  j["reasoning"] = d.reasoning;
  return j.dump(-1, ' ', false, json::error_handler_t::replace);
}

}  // namespace planverify
