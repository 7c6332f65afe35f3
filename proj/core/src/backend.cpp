#include "planverify/backend.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "planverify/ltl.hpp"
#include "planverify/plan.hpp"

namespace planverify {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

std::string lowercase(std::string_view s) {
  std::string out(s);
  for (char& c : out) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return out;
}

/// Splits on ',', ';', '.', and the words "then" / "and".
std::vector<std::string> clauses(std::string_view task) {
  std::vector<std::string> out;
  std::string current;
  std::istringstream words{[&] {
    std::string spaced;
    for (char c : task) {
      if (c == ',' || c == ';' || c == '.') {
        spaced += " , ";
      } else {
        spaced += c;
      }
    }
    return spaced;
  }()};
  std::string w;
  auto flush = [&] {
    if (!current.empty()) out.push_back(current);
    current.clear();
  };
  while (words >> w) {
    const std::string lw = lowercase(w);
    if (lw == "," || lw == "then" || lw == "and") {
      flush();
      continue;
    }
    if (!current.empty()) current += ' ';
    current += w;
  }
  flush();
  return out;
}

}  // namespace

std::string heuristic_translation(std::string_view task) {
  std::string out;
  for (const auto& clause : clauses(task)) {
    const std::string prop = normalize(clause);
    if (!ltl::is_valid_atom_name(prop)) continue;
    if (!out.empty()) out += " & ";
    out += "F(" + prop + ")";
  }
  return out;
}

// ---------------------------------------------------------------------------

ScriptedBackend::ScriptedBackend(std::vector<std::string> judge_script, std::vector<std::string> translation_script,
                                 bool cycle)
    : judge_script_(std::move(judge_script)), translation_script_(std::move(translation_script)), cycle_(cycle) {}

std::unique_ptr<ScriptedBackend> ScriptedBackend::from_file(const std::string& path, bool cycle) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open script file '" + path + "'");
  std::vector<std::string> judge;
  std::vector<std::string> translate;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    if (t.starts_with("judge:")) {
      judge.push_back(trim(std::string_view(t).substr(6)));
    } else if (t.starts_with("translate:")) {
      translate.push_back(trim(std::string_view(t).substr(10)));
    } else {
      throw std::runtime_error(path + ":" + std::to_string(lineno) +
                               ": expected a line starting with 'judge:' or 'translate:'");
    }
  }
  return std::make_unique<ScriptedBackend>(std::move(judge), std::move(translate), cycle);
}

std::string ScriptedBackend::next(std::vector<std::string>& script, std::size_t& cursor, std::string_view fallback) {
  if (script.empty()) return std::string(fallback);
  std::size_t k = cursor;
  if (k >= script.size()) k = cycle_ ? k % script.size() : script.size() - 1;
  ++cursor;
  return script[k];
}

JudgeDecision ScriptedBackend::judge(const JudgeRequest& r) {
  std::string response;
  {
    std::lock_guard lock(mu_);
    judge_log_.push_back(r);
    response = next(judge_script_, judge_cursor_, R"({"verdict":"keep","reasoning":"script exhausted"})");
  }
  return parse_decision(response);
}

std::string ScriptedBackend::complete(const TranslationRequest& r) {
  std::lock_guard lock(mu_);
  translation_log_.push_back(r);
  return next(translation_script_, translation_cursor_, "");
}

std::size_t ScriptedBackend::judge_calls() const {
  std::lock_guard lock(mu_);
  return judge_log_.size();
}

std::size_t ScriptedBackend::translation_calls() const {
  std::lock_guard lock(mu_);
  return translation_log_.size();
}

std::vector<JudgeRequest> ScriptedBackend::judge_requests() const {
  std::lock_guard lock(mu_);
  return judge_log_;
}

std::vector<TranslationRequest> ScriptedBackend::translation_requests() const {
  std::lock_guard lock(mu_);
  return translation_log_;
}

// ---------------------------------------------------------------------------

JudgeDecision RecordingBackend::judge(const JudgeRequest& r) {
  {
    std::lock_guard lock(mu_);
    judge_log_.push_back(r);
  }
  return inner_.judge(r);
}

std::string RecordingBackend::complete(const TranslationRequest& r) {
  {
    std::lock_guard lock(mu_);
    translation_log_.push_back(r);
  }
  return inner_.complete(r);
}

std::vector<JudgeRequest> RecordingBackend::judge_requests() const {
  std::lock_guard lock(mu_);
  return judge_log_;
}

std::vector<TranslationRequest> RecordingBackend::translation_requests() const {
  std::lock_guard lock(mu_);
  return translation_log_;
}

// ---------------------------------------------------------------------------

namespace {

constexpr std::uint64_t kFnvOffset = 1469598103934665603ULL;
constexpr std::uint64_t kFnvPrime = 1099511628211ULL;

void mix(std::uint64_t& h, std::string_view s) {
  for (unsigned char c : s) {
    h ^= c;
    h *= kFnvPrime;
  }
  h ^= 0xFF;  // field separator
  h *= kFnvPrime;
}

}  // namespace

std::uint64_t request_fingerprint(const JudgeRequest& r, std::uint64_t seed) {
  std::uint64_t h = kFnvOffset ^ seed;
  mix(h, r.task);
  for (const auto& p : r.props) mix(h, p);
  mix(h, "|prev");
  for (const auto& a : r.prev) mix(h, a.norm);
  mix(h, "|cur");
  mix(h, r.current.norm);
  mix(h, "|next");
  for (const auto& a : r.next) mix(h, a.norm);
  mix(h, std::to_string(r.index));
  mix(h, std::to_string(r.window));
  return h;
}

NoisyBackend::NoisyBackend(std::shared_ptr<Backend> oracle, std::map<std::size_t, double> accuracy_by_window,
                           std::uint64_t seed, double default_accuracy)
    : oracle_(std::move(oracle)),
      accuracy_(std::move(accuracy_by_window)),
      seed_(seed),
      default_accuracy_(default_accuracy) {}

std::map<std::size_t, double> NoisyBackend::parse_accuracy(std::string_view spec) {
  std::map<std::size_t, double> out;
  std::istringstream in{std::string(spec)};
  std::string item;
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw std::invalid_argument("accuracy entry '" + item + "' is not of the form w=p");
    std::size_t w = 0;
    const std::string ws = trim(std::string_view(item).substr(0, eq));
    auto [ptr, ec] = std::from_chars(ws.data(), ws.data() + ws.size(), w);
    if (ec != std::errc{} || ptr != ws.data() + ws.size()) {
      throw std::invalid_argument("bad window size in '" + item + "'");
    }
    double p = 0;
    try {
      p = std::stod(item.substr(eq + 1));
    } catch (const std::exception&) {
      throw std::invalid_argument("bad accuracy in '" + item + "'");
    }
    if (p < 0.0 || p > 1.0) throw std::invalid_argument("accuracy out of [0,1] in '" + item + "'");
    out[w] = p;
  }
  return out;
}

JudgeDecision NoisyBackend::judge(const JudgeRequest& r) {
  JudgeDecision d = oracle_->judge(r);
  if (d.verdict == Verdict::Keep) return d;
  const auto it = accuracy_.find(r.window);
  const double accuracy = it == accuracy_.end() ? default_accuracy_ : it->second;
  const double u = static_cast<double>(request_fingerprint(r, seed_) >> 11) * 0x1.0p-53;
  if (u < accuracy) return d;
  return JudgeDecision::keep("noise: dropped " + std::string(to_string(d.verdict)) + " verdict");
}

}  // namespace planverify
