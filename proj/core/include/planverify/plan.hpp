// plan.hpp - plans, action normalization and the three edit operations.
//
// Plans are values.  Every edit returns a new plan and leaves its input
// untouched; an EditLog records the edits so that replaying it over the
// original plan reproduces the result exactly.
#pragma once

#include <cstddef>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "planverify/ltl.hpp"

namespace planverify {

/// Lowercases action text, drops stop words and joins the remaining
/// alphanumeric tokens with '_'.
class Normalizer {
 public:
  /// Uses default_stop_words().
  Normalizer();
  explicit Normalizer(std::set<std::string> stop_words);

  std::string operator()(std::string_view raw) const;
  const std::set<std::string>& stop_words() const noexcept { return stop_words_; }

  static const std::set<std::string>& default_stop_words();
  static const Normalizer& standard();

 private:
  std::set<std::string> stop_words_;
};

/// normalize() with the standard stop-word list.
std::string normalize(std::string_view raw);

/// "add_tea_bag" -> "add tea bag".
std::string display_text(std::string_view norm);

struct Action {
  std::string raw;
  std::string norm;

  static Action from_text(std::string_view raw, const Normalizer& n = Normalizer::standard());

  friend bool operator==(const Action&, const Action&) = default;
};

struct Plan {
  std::string task;
  std::vector<Action> actions;

  static Plan from_texts(std::string task, const std::vector<std::string>& texts,
                         const Normalizer& n = Normalizer::standard());

  std::size_t size() const noexcept { return actions.size(); }
  bool empty() const noexcept { return actions.empty(); }
  std::vector<std::string> norms() const;
  std::vector<std::string> texts() const;

  friend bool operator==(const Plan&, const Plan&) = default;
};

enum class EditKind { Remove, Insert, Move };

std::string_view to_string(EditKind kind);

/// One applied edit.  For Remove and Insert, `index` is the position in the
/// plan the edit was applied to and `action` is the removed or inserted
/// action.  For Move, `index` is the source and `target` the destination,
/// interpreted after the source has been removed.
struct Edit {
  EditKind kind = EditKind::Remove;
  std::size_t index = 0;
  std::size_t target = 0;
  Action action;

  static Edit remove(std::size_t index, Action removed);
  static Edit insert(std::size_t index, Action inserted);
  static Edit move(std::size_t from, std::size_t to, Action moved);

  friend bool operator==(const Edit&, const Edit&) = default;
};

using EditLog = std::vector<Edit>;

/// Throws IndexOutOfRange unless i < p.size().
Plan remove_at(const Plan& p, std::size_t i);
/// Places `a` at position i (before the current element i); i may equal p.size().
Plan insert_at(const Plan& p, std::size_t i, Action a);
/// Relocates element `from` so that it ends up at index `to`; `to` is
/// interpreted after removal of `from`.  move_to(p, k, k) == p.
Plan move_to(const Plan& p, std::size_t from, std::size_t to);

Plan apply(const Plan& p, const Edit& e);
Plan replay(Plan p, const EditLog& log);

/// Step i holds each proposition equal to the normalized form of action i.
ltl::Trace to_trace(const Plan& p, const std::vector<std::string>& props);

}  // namespace planverify
