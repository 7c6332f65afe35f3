#include "planverify/metrics.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cstdint>
#include <set>

namespace planverify {

namespace {

// First seven bytes plus the length.  Equal fingerprints mean equal tokens
// whenever the token fits in seven bytes; longer ones need a full compare.
std::uint64_t fingerprint(const std::string& s) noexcept {
  std::uint64_t v = std::uint64_t{std::min<std::size_t>(s.size(), 255)} << 56;
  const std::size_t n = std::min<std::size_t>(s.size(), 7);
  for (std::size_t k = 0; k < n; ++k) v |= std::uint64_t{static_cast<unsigned char>(s[k])} << (8 * k);
  return v;
}

bool fits(const std::string& s) noexcept { return s.size() <= 7; }

// Bit-parallel LCS (Allison-Dix, Crochemore et al.) for |b| <= 64.
std::size_t lcs_bits(const Tokens& a, const Tokens& b) {
  std::array<std::uint64_t, 64> fb;
  for (std::size_t j = 0; j < b.size(); ++j) fb[j] = fingerprint(b[j]);
  const std::uint64_t all = b.size() == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << b.size()) - 1;
  std::uint64_t v = ~std::uint64_t{0};
  for (const auto& x : a) {
    const std::uint64_t fx = fingerprint(x);
    std::uint64_t m = 0;
    for (std::size_t j = 0; j < b.size(); ++j) m |= std::uint64_t{fx == fb[j]} << j;
    if (!fits(x) && m != 0) {
      for (std::size_t j = 0; j < b.size(); ++j) {
        if ((m >> j & 1) && x != b[j]) m &= ~(std::uint64_t{1} << j);
      }
    }
    const std::uint64_t u = v & m;
    v = (v + u) | (v - u);
  }
  return b.size() - static_cast<std::size_t>(std::popcount(v & all));
}

std::size_t lcs_rows(const Tokens& a, const Tokens& b) {
  std::vector<std::size_t> row(b.size() + 1, 0);
  for (const auto& x : a) {
    std::size_t diag = 0;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const std::size_t up = row[j];
      row[j] = x == b[j - 1] ? diag + 1 : std::max(row[j], row[j - 1]);
      diag = up;
    }
  }
  return row[b.size()];
}

}  // namespace

std::size_t lcs_length(const Tokens& a, const Tokens& b) {
  if (a.empty() || b.empty()) return 0;
  const Tokens& shorter = a.size() < b.size() ? a : b;
  const Tokens& longer = a.size() < b.size() ? b : a;
  if (shorter.size() <= 64) return lcs_bits(longer, shorter);
  return lcs_rows(longer, shorter);
}

double lcs_similarity(const Tokens& a, const Tokens& b) {
  const std::size_t longest = std::max(a.size(), b.size());
  if (longest == 0) return 1.0;
  return static_cast<double>(lcs_length(a, b)) / static_cast<double>(longest);
}

namespace {

std::size_t set_difference_size(const Tokens& lhs, const Tokens& rhs) {
  const std::set<std::string> l(lhs.begin(), lhs.end());
  const std::set<std::string> r(rhs.begin(), rhs.end());
  return static_cast<std::size_t>(
      std::count_if(l.begin(), l.end(), [&](const std::string& t) { return !r.contains(t); }));
}

}  // namespace

std::size_t missing_actions(const Tokens& ref, const Tokens& gen) { return set_difference_size(ref, gen); }

std::size_t extra_actions(const Tokens& ref, const Tokens& gen) { return set_difference_size(gen, ref); }

std::size_t order_errors(const Tokens& ref, const Tokens& gen) {
  const std::size_t common = std::min(ref.size(), gen.size());
  std::size_t errors = 0;
  for (std::size_t i = 0; i < common; ++i) errors += ref[i] != gen[i] ? 1 : 0;
  if (gen.size() > ref.size()) errors += gen.size() - ref.size();
  return errors;
}

EditTriple triple(const Edit& e) {
  if (e.kind == EditKind::Move) return {e.kind, e.index, std::to_string(e.target)};
  return {e.kind, e.index, e.action.norm};
}

double F1Counts::precision() const noexcept {
  return predicted == 0 ? 0.0 : static_cast<double>(matched) / static_cast<double>(predicted);
}

double F1Counts::recall() const noexcept {
  return gold == 0 ? 0.0 : static_cast<double>(matched) / static_cast<double>(gold);
}

double F1Counts::f1() const noexcept {
  if (predicted == 0 && gold == 0) return 1.0;
  if (predicted == 0 || gold == 0 || matched == 0) return 0.0;
  const double p = precision();
  const double r = recall();
  return 2.0 * p * r / (p + r);
}

F1Counts& F1Counts::operator+=(const F1Counts& o) noexcept {
  matched += o.matched;
  predicted += o.predicted;
  gold += o.gold;
  return *this;
}

F1Counts match_edits(const EditLog& predicted, const EditLog& gold) {
  std::set<EditTriple> p;
  std::set<EditTriple> g;
  for (const auto& e : predicted) p.insert(triple(e));
  for (const auto& e : gold) g.insert(triple(e));
  F1Counts c;
  c.predicted = p.size();
  c.gold = g.size();
  for (const auto& t : p) c.matched += g.contains(t) ? 1 : 0;
  return c;
}

double decision_f1(const EditLog& predicted, const EditLog& gold) { return match_edits(predicted, gold).f1(); }

MetricsReport evaluate(const Plan& ref, const Plan& gen) {
  const Tokens r = ref.norms();
  const Tokens g = gen.norms();
  MetricsReport m;
  m.lcs_similarity = lcs_similarity(r, g);
  m.missing_actions = missing_actions(r, g);
  m.extra_actions = extra_actions(r, g);
  m.order_errors = order_errors(r, g);
  return m;
}

}  // namespace planverify
