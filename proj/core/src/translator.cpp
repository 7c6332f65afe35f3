#include "planverify/translator.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"

namespace planverify {

using nlohmann::json;

FewShotStore::FewShotStore(std::vector<FewShotExample> examples, std::size_t k)
    : examples_(std::move(examples)), k_(k) {
  for (const auto& e : examples_) {
    auto v = ltl::validate(e.ltl);
    if (!v.ok()) {
      throw std::invalid_argument("few-shot formula for '" + e.task + "' is invalid: " + v.diagnostic->to_string());
    }
  }
}

FewShotStore FewShotStore::load_jsonl(const std::string& path, std::size_t k) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open few-shot file '" + path + "'");
  std::vector<FewShotExample> examples;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json j = json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object() || !j.contains("task") || !j.contains("ltl") || !j["task"].is_string() ||
        !j["ltl"].is_string()) {
      throw std::runtime_error(path + ":" + std::to_string(lineno) + ": expected {\"task\": ..., \"ltl\": ...}");
    }
    examples.push_back({j["task"].get<std::string>(), j["ltl"].get<std::string>()});
  }
  return FewShotStore(std::move(examples), k);
}

FewShotStore FewShotStore::seed() {
  return FewShotStore({
      {"Boil water in the kettle and make coffee",
       "F(fill_kettle) & F(boil_water) & F(make_coffee) & (!make_coffee U boil_water)"},
      {"Wash the dishes, then dry them", "F(wash_dishes) & F(dry_dishes) & (!dry_dishes U wash_dishes)"},
      {"Turn on the TV and watch the news", "F(switch_tv) & F(watch_news) & (!watch_news U switch_tv)"},
      {"Put the milk in the fridge and close the fridge",
       "F(put_milk_fridge) & F(close_fridge) & (!close_fridge U put_milk_fridge)"},
      {"Water the plants but never leave the tap running",
       "F(water_plants) & G(!turn_tap | F(turn_off_tap))"},
  });
}

TranslationFailed::TranslationFailed(int attempts, std::string last_diagnostic)
    : std::runtime_error("LTL translation failed after " + std::to_string(attempts) +
                         " attempts: " + last_diagnostic),
      attempts_(attempts),
      diagnostic_(std::move(last_diagnostic)) {}

std::string build_translation_prompt(const std::string& task, const FewShotStore& store, const std::string& previous,
                                     const std::string& diagnostic) {
  std::ostringstream os;
  os << "Translate the household task into a Linear Temporal Logic formula.\n"
        "Propositions are lowercase identifiers made of letters, digits and underscores "
        "(for example heat_water).\n"
        "Operators: F(x) eventually, G(x) always, x U y until, & and, | or, ! not.\n"
        "Answer with the formula only.\n\n";
  const std::size_t k = std::min(store.k(), store.examples().size());
  for (std::size_t i = 0; i < k; ++i) {
    os << "Task: " << store.examples()[i].task << "\n";
    os << "LTL: " << store.examples()[i].ltl << "\n\n";
  }
  os << "Task: " << task << "\n";
  if (!previous.empty() || !diagnostic.empty()) {
    os << "Your previous answer was: " << previous << "\n";
    os << "It was rejected by the formula validator: " << diagnostic << "\n";
    os << "Return a corrected formula.\n";
  }
  os << "LTL:";
  return os.str();
}

std::string extract_formula_text(std::string_view answer) {
  std::istringstream in{std::string(answer)};
  std::string line;
  while (std::getline(in, line)) {
    auto b = line.find_first_not_of(" \t\r`");
    if (b == std::string::npos) continue;
    std::string t = line.substr(b);
    if (t.starts_with("ltl") && t.find_first_not_of(" \t\r`") != std::string::npos && t.size() <= 3) {
      continue;  // language tag of a fenced block
    }
    if (t.starts_with("LTL:")) t = t.substr(4);
    auto e = t.find_last_not_of(" \t\r`");
    if (e == std::string::npos) continue;
    t = t.substr(0, e + 1);
    b = t.find_first_not_of(" \t");
    if (b == std::string::npos) continue;
    return t.substr(b);
  }
  return {};
}

Translation translate(const std::string& task, const FewShotStore& store, Backend& backend) {
  if (store.empty()) throw std::invalid_argument("few-shot store is empty");
  std::string previous;
  std::string diagnostic;
  for (int attempt = 1; attempt <= kMaxTranslationAttempts; ++attempt) {
    TranslationRequest req;
    req.task = task;
    req.attempt = attempt;
    req.previous = previous;
    req.diagnostic = diagnostic;
    req.prompt = build_translation_prompt(task, store, previous, diagnostic);

    const std::string answer = backend.complete(req);
    const std::string text = extract_formula_text(answer);
    auto v = ltl::validate(text);
    if (v.ok()) return Translation{*v.formula, attempt, text};
    previous = text;
    diagnostic = v.diagnostic->to_string();
  }
  throw TranslationFailed(kMaxTranslationAttempts, diagnostic);
}

}  // namespace planverify
