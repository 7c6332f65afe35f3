#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "planverify/metrics.hpp"

using namespace planverify;

namespace {

Tokens T(const std::string& s) { return oracle::tokens(s); }

std::string random_word(std::mt19937_64& rng, std::size_t max_len, int alphabet) {
  std::uniform_int_distribution<std::size_t> len(0, max_len);
  std::uniform_int_distribution<int> sym(0, alphabet - 1);
  std::string s;
  for (std::size_t n = len(rng); n > 0; --n) s += static_cast<char>('a' + sym(rng));
  return s;
}

}  // namespace

TEST_CASE("lcs similarity") {
  CHECK(lcs_similarity(T("abc"), T("abc")) == 1.0);
  CHECK(lcs_similarity(T("abc"), T("xyz")) == 0.0);
  CHECK(lcs_similarity(T("abc"), T("ac")) == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
  CHECK(lcs_similarity({}, {}) == 1.0);
  CHECK(lcs_similarity(T("a"), {}) == 0.0);
  CHECK(lcs_length(T("abcbdab"), T("bdcaba")) == 4);
}

TEST_CASE("property: lcs matches subsequence enumeration and is symmetric") {
  std::mt19937_64 rng(41);
  for (int k = 0; k < 3000; ++k) {
    const std::string a = random_word(rng, 8, 3);
    const std::string b = random_word(rng, 8, 3);
    CHECK(lcs_length(T(a), T(b)) == oracle::lcs_brute(a, b));
    CHECK(lcs_similarity(T(a), T(b)) == lcs_similarity(T(b), T(a)));
    const double s = lcs_similarity(T(a), T(b));
    CHECK(s >= 0.0);
    CHECK(s <= 1.0);
  }
}

TEST_CASE("lcs with long tokens and long plans") {
  // same length and same first bytes, different tokens
  CHECK(lcs_length({"pour hot water"}, {"pour hot milk!"}) == 0);
  CHECK(lcs_length({"pour hot water", "x"}, {"y", "pour hot water"}) == 1);
  CHECK(lcs_length({"abcdefg"}, {"abcdefg"}) == 1);
  CHECK(lcs_length({"abcdefgh"}, {"abcdefgi"}) == 0);
  CHECK(lcs_length({""}, {""}) == 1);

  // plain quadratic table as the reference for sizes past one machine word
  auto table = [](const Tokens& a, const Tokens& b) {
    std::vector<std::vector<std::size_t>> t(a.size() + 1, std::vector<std::size_t>(b.size() + 1, 0));
    for (std::size_t i = 1; i <= a.size(); ++i) {
      for (std::size_t j = 1; j <= b.size(); ++j) {
        t[i][j] = a[i - 1] == b[j - 1] ? t[i - 1][j - 1] + 1 : std::max(t[i - 1][j], t[i][j - 1]);
      }
    }
    return t[a.size()][b.size()];
  };
  const std::vector<std::string> vocab = {"pour hot water", "pour hot milk!", "a", "serve", "stir", ""};
  std::mt19937_64 rng(53);
  for (int k = 0; k < 300; ++k) {
    std::uniform_int_distribution<std::size_t> len(0, 150);
    std::uniform_int_distribution<std::size_t> pick(0, vocab.size() - 1);
    Tokens a(len(rng));
    Tokens b(len(rng));
    for (auto& t : a) t = vocab[pick(rng)];
    for (auto& t : b) t = vocab[pick(rng)];
    CHECK(lcs_length(a, b) == table(a, b));
  }
}

TEST_CASE("missing and extra actions use set semantics") {
  CHECK(missing_actions(T("abc"), T("ac")) == 1);
  CHECK(missing_actions(T("ab"), T("abx")) == 0);
  CHECK(missing_actions(T("aab"), T("b")) == 1);
  CHECK(extra_actions(T("ab"), T("abx")) == 1);
  CHECK(extra_actions(T("ab"), T("ab")) == 0);
  CHECK(extra_actions(T("ab"), {}) == 0);
}

TEST_CASE("order errors") {
  CHECK(order_errors(T("abc"), T("bac")) == 2);
  CHECK(order_errors(T("abc"), T("abc")) == 0);
  CHECK(order_errors(T("a"), T("abc")) == 2);
  CHECK(order_errors(T("abc"), T("a")) == 0);
  CHECK(order_errors({}, {}) == 0);
}

TEST_CASE("property: metric relations") {
  std::mt19937_64 rng(43);
  for (int k = 0; k < 2000; ++k) {
    const std::string a = random_word(rng, 10, 5);
    const std::string b = random_word(rng, 10, 5);
    CHECK(missing_actions(T(a), T(b)) == extra_actions(T(b), T(a)));
    CHECK(order_errors(T(a), T(a)) == 0);
    const std::size_t diff = a.size() > b.size() ? a.size() - b.size() : b.size() - a.size();
    // the surplus term alone only counts when gen is longer
    if (b.size() >= a.size()) CHECK(order_errors(T(a), T(b)) >= diff);
    CHECK(missing_actions(T(a), T(b)) <= a.size());
    CHECK(extra_actions(T(a), T(b)) <= b.size());
  }
}

TEST_CASE("property: metrics are invariant under re-normalization") {
  std::mt19937_64 rng(47);
  for (int k = 0; k < 300; ++k) {
    const Plan r = oracle::random_plan(rng, 8, 4);
    const Plan g = oracle::random_plan(rng, 8, 4);
    std::vector<std::string> rr;
    std::vector<std::string> gg;
    for (const auto& a : r.actions) rr.push_back(display_text(a.norm));
    for (const auto& a : g.actions) gg.push_back(display_text(a.norm));
    const auto m1 = evaluate(r, g);
    const auto m2 = evaluate(Plan::from_texts("", rr), Plan::from_texts("", gg));
    CHECK(m1.lcs_similarity == m2.lcs_similarity);
    CHECK(m1.missing_actions == m2.missing_actions);
    CHECK(m1.extra_actions == m2.extra_actions);
    CHECK(m1.order_errors == m2.order_errors);
  }
}

TEST_CASE("decision F1") {
  const Edit i3 = Edit::insert(3, Action::from_text("add tea bag"));
  const Edit r8 = Edit::remove(8, Action::from_text("pour tea"));
  const Edit r4 = Edit::remove(4, Action::from_text("pour tea"));
  const Edit m = Edit::move(2, 3, Action::from_text("x"));
  const Edit i5 = Edit::insert(5, Action::from_text("pour hot water"));
  CHECK(decision_f1({i3, r8}, {i3, r8}) == 1.0);
  CHECK(decision_f1({i3}, {r8}) == 0.0);
  CHECK(decision_f1({}, {}) == 1.0);
  CHECK(decision_f1({}, {r8}) == 0.0);
  CHECK(decision_f1({r8}, {}) == 0.0);
  // |gold| = |pred| = 4, overlap 3
  const Edit wrong = Edit::move(2, 4, Action::from_text("x"));
  const auto c = match_edits({i3, r8, r4, wrong}, {i3, r8, r4, m});
  CHECK(c.matched == 3);
  CHECK(c.precision() == 0.75);
  CHECK(c.recall() == 0.75);
  CHECK(c.f1() == doctest::Approx(0.75).epsilon(1e-12));
  // payload compares normalized text; move payload is the destination
  CHECK(decision_f1({Edit::insert(3, Action::from_text("Add the Tea Bag"))}, {i3}) == 1.0);
  CHECK(decision_f1({Edit::move(2, 3, Action::from_text("y"))}, {m}) == 1.0);
  CHECK(decision_f1({i5}, {Edit::insert(5, Action::from_text("pour water"))}) == 0.0);

  F1Counts pooled;
  pooled += match_edits({i3}, {i3});
  pooled += match_edits({}, {r8});
  CHECK(pooled.f1() == doctest::Approx(2.0 / 3.0));
}
