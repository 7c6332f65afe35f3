// translator.hpp - task description to LTL via few-shot prompting, with
// validation and bounded reprompting.
#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "planverify/backend.hpp"
#include "planverify/ltl.hpp"

namespace planverify {

struct FewShotExample {
  std::string task;
  std::string ltl;
};

/// Ordered (task, formula) pairs.  Every stored formula validates.
class FewShotStore {
 public:
  FewShotStore() = default;
  /// Throws std::invalid_argument if an example formula does not validate.
  explicit FewShotStore(std::vector<FewShotExample> examples, std::size_t k = 3);

  /// JSONL, one {"task": ..., "ltl": ...} object per line.
  static FewShotStore load_jsonl(const std::string& path, std::size_t k = 3);
  /// Five illustrative household examples.
  static FewShotStore seed();

  const std::vector<FewShotExample>& examples() const noexcept { return examples_; }
  std::size_t k() const noexcept { return k_; }
  void set_k(std::size_t k) noexcept { k_ = k; }
  bool empty() const noexcept { return examples_.empty(); }

 private:
  std::vector<FewShotExample> examples_;
  std::size_t k_ = 3;
};

inline constexpr int kMaxTranslationAttempts = 3;

class TranslationFailed : public std::runtime_error {
 public:
  TranslationFailed(int attempts, std::string last_diagnostic);
  int attempts() const noexcept { return attempts_; }
  const std::string& last_diagnostic() const noexcept { return diagnostic_; }

 private:
  int attempts_;
  std::string diagnostic_;
};

struct Translation {
  ltl::Formula formula;
  int attempts = 1;
  std::string text;  // accepted backend answer
};

/// First k examples, the task, and on retries the rejected answer together
/// with the parser diagnostic.
std::string build_translation_prompt(const std::string& task, const FewShotStore& store,
                                     const std::string& previous = {}, const std::string& diagnostic = {});

/// Pulls the formula out of a backend answer: strips code fences, a leading
/// "LTL:" label and surrounding whitespace, keeps the first non-empty line.
std::string extract_formula_text(std::string_view answer);

/// Up to kMaxTranslationAttempts backend calls; returns the first answer
/// that validates.  Throws TranslationFailed, or std::invalid_argument for
/// an empty store.  Backend exceptions propagate.
Translation translate(const std::string& task, const FewShotStore& store, Backend& backend);

}  // namespace planverify
