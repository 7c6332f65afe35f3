// metrics.hpp - plan quality metrics and edit-decision F1.
//
// All plan metrics compare normalized action tokens.
#pragma once

#include <compare>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "planverify/plan.hpp"

namespace planverify {

using Tokens = std::vector<std::string>;

std::size_t lcs_length(const Tokens& a, const Tokens& b);
/// |LCS(a, b)| / max(|a|, |b|); 1.0 when both are empty.
double lcs_similarity(const Tokens& a, const Tokens& b);

/// Distinct reference tokens absent from the generated plan.
std::size_t missing_actions(const Tokens& ref, const Tokens& gen);
/// Distinct generated tokens absent from the reference.
std::size_t extra_actions(const Tokens& ref, const Tokens& gen);
/// Positionwise mismatches over the common prefix length plus the surplus
/// length of the generated plan.
std::size_t order_errors(const Tokens& ref, const Tokens& gen);

/// An edit reduced to what F1 compares: (kind, position, payload).  Insert
/// and remove carry the normalized action, move carries its destination.
struct EditTriple {
  EditKind kind = EditKind::Remove;
  std::size_t position = 0;
  std::string payload;

  friend auto operator<=>(const EditTriple&, const EditTriple&) = default;
  friend bool operator==(const EditTriple&, const EditTriple&) = default;
};

EditTriple triple(const Edit& e);

struct F1Counts {
  std::size_t matched = 0;
  std::size_t predicted = 0;
  std::size_t gold = 0;

  /// 1.0 when both sets are empty, 0.0 when exactly one is.
  double f1() const noexcept;
  double precision() const noexcept;
  double recall() const noexcept;
  F1Counts& operator+=(const F1Counts& o) noexcept;
};

/// Set semantics: repeated identical triples count once.
F1Counts match_edits(const EditLog& predicted, const EditLog& gold);
double decision_f1(const EditLog& predicted, const EditLog& gold);

struct MetricsReport {
  double lcs_similarity = 0.0;
  std::size_t missing_actions = 0;
  std::size_t extra_actions = 0;
  std::size_t order_errors = 0;
  std::optional<double> f1;
};

MetricsReport evaluate(const Plan& ref, const Plan& gen);

}  // namespace planverify
