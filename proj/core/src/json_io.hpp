// Internal JSON helpers shared by the verifier and corpus reports.
#pragma once

#include "json.hpp"
#include "planverify/plan.hpp"
#include "planverify/verifier.hpp"

namespace planverify::detail {

inline std::string dump(const nlohmann::json& j, int indent) {
  return j.dump(indent, ' ', false, nlohmann::json::error_handler_t::replace);
}

inline nlohmann::json edit_json(const Edit& e) {
  nlohmann::json j;
  j["kind"] = std::string(to_string(e.kind));
  if (e.kind == EditKind::Move) {
    j["from"] = e.index;
    j["to"] = e.target;
  } else {
    j["index"] = e.index;
  }
  j["action"] = e.action.raw;
  return j;
}

inline nlohmann::json config_json(const VerifierConfig& c) {
  return {{"window", c.window},
          {"max_passes", c.max_passes},
          {"retry_cap", c.retry_cap},
          {"ltl_enabled", c.ltl_enabled},
          {"llm_verification_enabled", c.llm_verification_enabled}};
}

nlohmann::json report_json(const VerificationReport& r);

}  // namespace planverify::detail
