#include "planverify/plan.hpp"

#include <algorithm>
#include <sstream>

#include "planverify/errors.hpp"

namespace planverify {

namespace {

void check_index(std::size_t i, std::size_t limit, std::string_view what) {
  if (i >= limit) {
    std::ostringstream os;
    os << what << " index " << i << " out of range (limit " << limit << ")";
    throw IndexOutOfRange(os.str());
  }
}

}  // namespace

const std::set<std::string>& Normalizer::default_stop_words() {
  static const std::set<std::string> words{"a",    "an",   "the", "in", "on", "at", "to",  "from",
                                           "with", "into", "onto", "of", "for", "up", "down"};
  return words;
}

Normalizer::Normalizer() : stop_words_(default_stop_words()) {}

Normalizer::Normalizer(std::set<std::string> stop_words) : stop_words_(std::move(stop_words)) {}

const Normalizer& Normalizer::standard() {
  static const Normalizer n;
  return n;
}

std::string Normalizer::operator()(std::string_view raw) const {
  std::string out;
  std::string token;
  auto flush = [&] {
    if (!token.empty() && !stop_words_.contains(token)) {
      if (!out.empty()) out += '_';
      out += token;
    }
    token.clear();
  };
  for (char c : raw) {
    if (c >= 'A' && c <= 'Z') {
      token += static_cast<char>(c - 'A' + 'a');
    } else if ((c >= 'a' && c <= 'z') || (c >= '0' && c <= '9')) {
      token += c;
    } else {
      flush();
    }
  }
  flush();
  return out;
}

std::string normalize(std::string_view raw) { return Normalizer::standard()(raw); }

std::string display_text(std::string_view norm) {
  std::string out(norm);
  std::replace(out.begin(), out.end(), '_', ' ');
  return out;
}

Action Action::from_text(std::string_view raw, const Normalizer& n) {
  return Action{std::string(raw), n(raw)};
}

Plan Plan::from_texts(std::string task, const std::vector<std::string>& texts, const Normalizer& n) {
  Plan p;
  p.task = std::move(task);
  p.actions.reserve(texts.size());
  for (const auto& t : texts) p.actions.push_back(Action::from_text(t, n));
  return p;
}

std::vector<std::string> Plan::norms() const {
  std::vector<std::string> out;
  out.reserve(actions.size());
  for (const auto& a : actions) out.push_back(a.norm);
  return out;
}

std::vector<std::string> Plan::texts() const {
  std::vector<std::string> out;
  out.reserve(actions.size());
  for (const auto& a : actions) out.push_back(a.raw);
  return out;
}

std::string_view to_string(EditKind kind) {
  switch (kind) {
    case EditKind::Remove: return "remove";
    case EditKind::Insert: return "insert";
    case EditKind::Move: return "move";
  }
  return "unknown";
}

Edit Edit::remove(std::size_t index, Action removed) { return Edit{EditKind::Remove, index, 0, std::move(removed)}; }
Edit Edit::insert(std::size_t index, Action inserted) { return Edit{EditKind::Insert, index, 0, std::move(inserted)}; }
Edit Edit::move(std::size_t from, std::size_t to, Action moved) { return Edit{EditKind::Move, from, to, std::move(moved)}; }

Plan remove_at(const Plan& p, std::size_t i) {
  check_index(i, p.size(), "remove");
  Plan out = p;
  out.actions.erase(out.actions.begin() + static_cast<std::ptrdiff_t>(i));
  return out;
}

Plan insert_at(const Plan& p, std::size_t i, Action a) {
  check_index(i, p.size() + 1, "insert");
  Plan out = p;
  out.actions.insert(out.actions.begin() + static_cast<std::ptrdiff_t>(i), std::move(a));
  return out;
}

Plan move_to(const Plan& p, std::size_t from, std::size_t to) {
  check_index(from, p.size(), "move source");
  check_index(to, p.size(), "move target");
  if (from == to) return p;
  Action moved = p.actions[from];
  return insert_at(remove_at(p, from), to, std::move(moved));
}

Plan apply(const Plan& p, const Edit& e) {
  switch (e.kind) {
    case EditKind::Remove: return remove_at(p, e.index);
    case EditKind::Insert: return insert_at(p, e.index, e.action);
    case EditKind::Move: return move_to(p, e.index, e.target);
  }
  return p;
}

Plan replay(Plan p, const EditLog& log) {
  for (const auto& e : log) p = apply(p, e);
  return p;
}

ltl::Trace to_trace(const Plan& p, const std::vector<std::string>& props) {
  std::vector<std::vector<std::string>> steps;
  steps.reserve(p.size());
  for (const auto& a : p.actions) {
    std::vector<std::string> step;
    if (std::find(props.begin(), props.end(), a.norm) != props.end()) step.push_back(a.norm);
    steps.push_back(std::move(step));
  }
  return ltl::Trace(std::move(steps));
}

}  // namespace planverify
