#include "planverify/verifier.hpp"

#include <algorithm>
#include <stdexcept>

#include "json_io.hpp"
#include "planverify/errors.hpp"
#include "planverify/ltl.hpp"

namespace planverify {

using nlohmann::json;

void VerifierConfig::validate() const {
  if (window < 1) throw std::invalid_argument("window must be >= 1");
  if (max_passes < 1) throw std::invalid_argument("max_passes must be >= 1");
  if (retry_cap < 0) throw std::invalid_argument("retry_cap must be >= 0");
}

Window window(const Plan& p, std::size_t i, std::size_t w) {
  if (i >= p.size()) {
    throw IndexOutOfRange("window index " + std::to_string(i) + " out of range for plan of length " +
                          std::to_string(p.size()));
  }
  const std::size_t lo = i >= w ? i - w : 0;
  const std::size_t hi = std::min(p.size(), i + 1 + w);
  Window out;
  out.prev.assign(p.actions.begin() + static_cast<std::ptrdiff_t>(lo), p.actions.begin() + static_cast<std::ptrdiff_t>(i));
  out.current = p.actions[i];
  out.next.assign(p.actions.begin() + static_cast<std::ptrdiff_t>(i + 1),
                  p.actions.begin() + static_cast<std::ptrdiff_t>(hi));
  return out;
}

std::string_view to_string(StopReason r) {
  switch (r) {
    case StopReason::Converged: return "converged";
    case StopReason::Cap: return "cap";
    case StopReason::Disabled: return "disabled";
  }
  return "?";
}

std::string_view to_string(TranslationStatus s) {
  switch (s) {
    case TranslationStatus::Ok: return "ok";
    case TranslationStatus::Provided: return "provided";
    case TranslationStatus::Failed: return "failed";
    case TranslationStatus::Disabled: return "disabled";
  }
  return "?";
}

namespace {

struct Outcome {
  JudgeDecision decision;
  int calls = 0;
  bool defaulted = false;
  bool network = false;
  std::string error;
};

Outcome ask(Backend& backend, JudgeRequest req, int retry_cap) {
  Outcome out;
  for (int attempt = 0;; ++attempt) {
    req.attempt = attempt;
    ++out.calls;
    try {
      out.decision = backend.judge(req);
      if (!out.decision.well_formed()) throw MalformedResponse("decision violates its payload invariants");
      return out;
    } catch (const MalformedResponse& e) {
      out.error = std::string("malformed response: ") + e.what();
      if (attempt < retry_cap) continue;
    } catch (const NetworkError& e) {
      out.error = std::string("backend unreachable: ") + e.what();
      out.network = true;
    } catch (const std::exception& e) {
      out.error = std::string("backend error: ") + e.what();
    }
    out.decision = JudgeDecision::keep("defaulted to keep");
    out.defaulted = true;
    return out;
  }
}

}  // namespace

PassResult verify_pass(const Plan& p, const std::vector<std::string>& props, Backend& backend,
                       const VerifierConfig& cfg, int pass_number) {
  PassResult res;
  res.plan = p;
  Plan& plan = res.plan;
  const std::size_t insert_cap = p.size();
  std::size_t inserts = 0;
  bool cap_warned = false;

  std::size_t i = 0;
  while (i < plan.size()) {
    Window win = window(plan, i, cfg.window);
    JudgeRequest req;
    req.task = plan.task;
    req.props = props;
    req.earlier.assign(plan.actions.begin(), plan.actions.begin() + static_cast<std::ptrdiff_t>(i - win.prev.size()));
    req.prev = std::move(win.prev);
    req.current = win.current;
    req.next = std::move(win.next);
    req.index = i;
    req.plan_size = plan.size();
    req.window = cfg.window;

    DecisionRecord rec;
    rec.pass = pass_number;
    rec.index = i;
    rec.window_begin = req.window_start();
    rec.window_end = i + 1 + req.next.size();
    rec.action = req.current.raw;

    Outcome o = ask(backend, req, cfg.retry_cap);
    rec.decision = o.decision;
    rec.calls = o.calls;
    rec.defaulted = o.defaulted;
    rec.error = o.error;
    if (o.defaulted) {
      ++res.backend_errors;
      if (o.network) ++res.network_errors;
    } else {
      ++res.judged;
    }
    res.decisions.push_back(rec);

    switch (o.decision.verdict) {
      case Verdict::Keep:
        ++i;
        break;
      case Verdict::Remove:
        res.edits.push_back(Edit::remove(i, plan.actions[i]));
        plan = remove_at(plan, i);
        break;
      case Verdict::Augment: {
        if (inserts >= insert_cap) {
          if (!cap_warned) {
            res.warnings.push_back("pass " + std::to_string(pass_number) + ": insert cap of " +
                                   std::to_string(insert_cap) + " reached; further augments ignored");
            cap_warned = true;
          }
          ++i;
          break;
        }
        Action a = Action::from_text(o.decision.new_action);
        res.edits.push_back(Edit::insert(i, a));
        plan = insert_at(plan, i, std::move(a));
        ++inserts;
        i += 2;
        break;
      }
      case Verdict::Move: {
        std::size_t target = *o.decision.target_index;
        if (target >= plan.size()) {
          res.warnings.push_back("pass " + std::to_string(pass_number) + ": move target " + std::to_string(target) +
                                 " for index " + std::to_string(i) + " clamped to " +
                                 std::to_string(plan.size() - 1));
          target = plan.size() - 1;
        }
        if (target != i) {
          res.edits.push_back(Edit::move(i, target, plan.actions[i]));
          plan = move_to(plan, i, target);
        }
        ++i;
        break;
      }
    }
  }
  return res;
}

VerificationReport verify(const Plan& p, const std::string& task, Backend& backend, const VerifierConfig& cfg,
                          const VerifyOptions& opts) {
  cfg.validate();
  VerificationReport rep;
  rep.task = task;
  rep.backend = backend.name();
  rep.config = cfg;
  rep.input = p;
  rep.input.task = task;
  rep.output = rep.input;

  if (!cfg.llm_verification_enabled) {
    rep.stop_reason = StopReason::Disabled;
    rep.translation = TranslationStatus::Disabled;
    return rep;
  }

  std::optional<ltl::Formula> formula;
  if (cfg.ltl_enabled) {
    if (opts.formula) {
      auto v = ltl::validate(*opts.formula);
      if (v.ok()) {
        formula = v.formula;
        rep.translation = TranslationStatus::Provided;
      } else {
        rep.warnings.push_back("supplied formula rejected (" + v.diagnostic->to_string() + "); translating instead");
      }
    }
    if (!formula) {
      static const FewShotStore seed = FewShotStore::seed();
      const FewShotStore& store = opts.few_shot ? *opts.few_shot : seed;
      try {
        Translation t = translate(task, store, backend);
        formula = t.formula;
        rep.translation = TranslationStatus::Ok;
        rep.translation_attempts = t.attempts;
      } catch (const TranslationFailed& e) {
        rep.translation = TranslationStatus::Failed;
        rep.translation_attempts = e.attempts();
        rep.translation_diagnostic = e.last_diagnostic();
      } catch (const std::exception& e) {
        rep.translation = TranslationStatus::Failed;
        rep.translation_diagnostic = e.what();
        ++rep.backend_errors;
        if (dynamic_cast<const NetworkError*>(&e)) ++rep.network_errors;
      }
    }
  }
  if (formula) {
    rep.formula = ltl::print_bare(*formula);
    rep.props = ltl::extract_props(*formula);
  }

  Plan current = rep.input;
  rep.stop_reason = StopReason::Cap;
  for (int pass = 1; pass <= cfg.max_passes; ++pass) {
    PassResult r = verify_pass(current, rep.props, backend, cfg, pass);
    rep.passes = pass;
    rep.edits.insert(rep.edits.end(), r.edits.begin(), r.edits.end());
    std::move(r.decisions.begin(), r.decisions.end(), std::back_inserter(rep.decisions));
    std::move(r.warnings.begin(), r.warnings.end(), std::back_inserter(rep.warnings));
    rep.backend_errors += r.backend_errors;
    rep.network_errors += r.network_errors;
    rep.judged += r.judged;
    current = std::move(r.plan);
    if (r.edits.empty()) {
      rep.stop_reason = StopReason::Converged;
      break;
    }
  }
  rep.output = std::move(current);

  if (formula && !rep.output.empty()) {
    rep.trace_satisfied = ltl::eval_trace(*formula, to_trace(rep.output, rep.props));
  }
  return rep;
}

namespace detail {

json report_json(const VerificationReport& r) {
  json j;
  j["schema"] = 1;
  j["task"] = r.task;
  j["backend"] = r.backend;
  j["config"] = config_json(r.config);
  j["translation"] = {{"status", std::string(to_string(r.translation))},
                      {"formula", r.formula ? json(*r.formula) : json(nullptr)},
                      {"attempts", r.translation_attempts},
                      {"diagnostic", r.translation_diagnostic}};
  j["props"] = r.props;
  j["input"] = r.input.texts();
  j["output"] = r.output.texts();
  j["edits"] = json::array();
  for (const auto& e : r.edits) j["edits"].push_back(edit_json(e));
  j["passes"] = r.passes;
  j["stop_reason"] = std::string(to_string(r.stop_reason));
  j["decisions"] = json::array();
  for (const auto& d : r.decisions) {
    json dj = {{"pass", d.pass},
               {"index", d.index},
               {"window", {d.window_begin, d.window_end}},
               {"action", d.action},
               {"verdict", std::string(to_string(d.decision.verdict))},
               {"reasoning", d.decision.reasoning},
               {"calls", d.calls}};
    if (d.decision.target_index) dj["target_index"] = *d.decision.target_index;
    if (!d.decision.new_action.empty()) dj["new_action"] = d.decision.new_action;
    if (d.defaulted) dj["error"] = d.error;
    j["decisions"].push_back(std::move(dj));
  }
  j["warnings"] = r.warnings;
  j["backend_errors"] = r.backend_errors;
  j["trace_satisfied"] = r.trace_satisfied ? json(*r.trace_satisfied) : json(nullptr);
  return j;
}

}  // namespace detail

std::string report_to_json(const VerificationReport& r, int indent) {
  return detail::dump(detail::report_json(r), indent);
}

}  // namespace planverify
