#include "planverify/ltl.hpp"

#include <algorithm>
#include <sstream>

#include "planverify/errors.hpp"

namespace planverify::ltl {

namespace {

bool is_reserved(std::string_view w) { return w == "and" || w == "or" || w == "not"; }

bool same(const FormulaNode* a, const FormulaNode* b) {
  if (a == b) return true;
  if (a == nullptr || b == nullptr) return false;
  if (a->op != b->op || a->size != b->size) return false;
  if (a->op == Op::Atom) return a->name == b->name;
  return same(a->lhs.get(), b->lhs.get()) && same(a->rhs.get(), b->rhs.get());
}

}  // namespace

bool is_valid_atom_name(std::string_view name) {
  if (name.empty() || name[0] < 'a' || name[0] > 'z') return false;
  for (char c : name) {
    bool ok = (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_';
    if (!ok) return false;
  }
  return !is_reserved(name);
}

// ---------------------------------------------------------------------------
// Formula

Formula Formula::make(Op op, std::shared_ptr<const FormulaNode> lhs,
                      std::shared_ptr<const FormulaNode> rhs) {
  auto n = std::make_shared<FormulaNode>();
  n->op = op;
  std::size_t d = 0;
  std::size_t s = 1;
  if (lhs) {
    d = std::max(d, lhs->depth);
    s += lhs->size;
  }
  if (rhs) {
    d = std::max(d, rhs->depth);
    s += rhs->size;
  }
  n->depth = d + 1;
  n->size = s;
  n->lhs = std::move(lhs);
  n->rhs = std::move(rhs);
  return Formula(std::move(n));
}

Formula Formula::atom(std::string name) {
  if (!is_valid_atom_name(name)) {
    throw UnknownSymbol({ErrorKind::UnknownSymbol, 1, "", "invalid proposition name '" + name + "'"});
  }
  auto n = std::make_shared<FormulaNode>();
  n->op = Op::Atom;
  n->name = std::move(name);
  return Formula(std::move(n));
}

Formula Formula::negate(const Formula& f) {
  switch (f.op()) {
    case Op::Atom:
      return make(Op::Not, f.node_, nullptr);
    case Op::Not:
      return f.lhs();
    case Op::And:
      return disj(negate(f.lhs()), negate(f.rhs()));
    case Op::Or:
      return conj(negate(f.lhs()), negate(f.rhs()));
    case Op::Eventually:
      return globally(negate(f.lhs()));
    case Op::Globally:
      return eventually(negate(f.lhs()));
    case Op::Until: {
      Formula not_a = negate(f.lhs());
      Formula not_b = negate(f.rhs());
      return disj(globally(not_b), until(not_b, conj(not_a, not_b)));
    }
  }
  throw std::logic_error("unreachable formula operator");
}

Formula Formula::conj(const Formula& lhs, const Formula& rhs) { return make(Op::And, lhs.node_, rhs.node_); }
Formula Formula::disj(const Formula& lhs, const Formula& rhs) { return make(Op::Or, lhs.node_, rhs.node_); }
Formula Formula::globally(const Formula& f) { return make(Op::Globally, f.node_, nullptr); }
Formula Formula::eventually(const Formula& f) { return make(Op::Eventually, f.node_, nullptr); }
Formula Formula::until(const Formula& lhs, const Formula& rhs) { return make(Op::Until, lhs.node_, rhs.node_); }

Formula Formula::lhs() const {
  if (!node_->lhs) throw std::logic_error("atom has no operand");
  return Formula(node_->lhs);
}

Formula Formula::rhs() const {
  if (!node_->rhs) throw std::logic_error("formula has no right operand");
  return Formula(node_->rhs);
}

bool operator==(const Formula& a, const Formula& b) { return same(a.node_.get(), b.node_.get()); }

// ---------------------------------------------------------------------------
// Diagnostics

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Syntax: return "SyntaxError";
    case ErrorKind::EmptyFormula: return "EmptyFormula";
    case ErrorKind::UnknownSymbol: return "UnknownSymbol";
    case ErrorKind::Contradiction: return "Contradiction";
  }
  return "Error";
}

std::string Diagnostic::to_string() const {
  std::ostringstream os;
  os << ltl::to_string(kind) << " at column " << column << ": " << message;
  if (!expected.empty()) os << " (expected " << expected << ")";
  return os.str();
}

LtlError::LtlError(Diagnostic d) : std::runtime_error(d.to_string()), diag_(std::move(d)) {}

// ---------------------------------------------------------------------------
// Lexer / parser

namespace {

enum class Tok { End, LParen, RParen, And, Or, Not, Eventually, Globally, Until, Atom };

struct Token {
  Tok kind = Tok::End;
  std::size_t column = 1;
  std::string text;
};

std::string describe(const Token& t) {
  switch (t.kind) {
    case Tok::End: return "end of input";
    case Tok::Atom: return "'" + t.text + "'";
    default: return "'" + t.text + "'";
  }
}

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  const Token& peek() {
    if (!cached_) {
      tok_ = scan();
      cached_ = true;
    }
    return tok_;
  }

  Token next() {
    peek();
    cached_ = false;
    return tok_;
  }

 private:
  bool starts_with(std::string_view s) const { return src_.substr(pos_).starts_with(s); }

  Token make(Tok k, std::size_t start, std::size_t len) {
    Token t{k, start + 1, std::string(src_.substr(start, len))};
    pos_ = start + len;
    return t;
  }

  Token scan() {
    while (pos_ < src_.size() &&
           (src_[pos_] == ' ' || src_[pos_] == '\t' || src_[pos_] == '\n' || src_[pos_] == '\r')) {
      ++pos_;
    }
    const std::size_t start = pos_;
    if (pos_ >= src_.size()) return Token{Tok::End, src_.size() + 1, ""};

    const char c = src_[pos_];
    switch (c) {
      case '(': return make(Tok::LParen, start, 1);
      case ')': return make(Tok::RParen, start, 1);
      case '&': return make(Tok::And, start, starts_with("&&") ? 2 : 1);
      case '|': return make(Tok::Or, start, starts_with("||") ? 2 : 1);
      case '!':
      case '~': return make(Tok::Not, start, 1);
      default: break;
    }
    if (starts_with("\xE2\x88\xA7")) return make(Tok::And, start, 3);  // conjunction sign
    if (starts_with("\xE2\x88\xA8")) return make(Tok::Or, start, 3);   // disjunction sign
    if (starts_with("\xC2\xAC")) return make(Tok::Not, start, 2);      // negation sign

    auto is_word = [](char ch) {
      return (ch >= 'a' && ch <= 'z') || (ch >= 'A' && ch <= 'Z') || (ch >= '0' && ch <= '9') || ch == '_';
    };
    if (is_word(c)) {
      std::size_t end = pos_;
      while (end < src_.size() && is_word(src_[end])) ++end;
      const std::string_view word = src_.substr(start, end - start);
      if (word == "F") return make(Tok::Eventually, start, 1);
      if (word == "G") return make(Tok::Globally, start, 1);
      if (word == "U") return make(Tok::Until, start, 1);
      if (word == "and") return make(Tok::And, start, 3);
      if (word == "or") return make(Tok::Or, start, 2);
      if (word == "not") return make(Tok::Not, start, 3);
      if (is_valid_atom_name(word)) return make(Tok::Atom, start, word.size());
      throw UnknownSymbol({ErrorKind::UnknownSymbol, start + 1, "",
                           "invalid proposition '" + std::string(word) +
                               "' (propositions match [a-z][a-z0-9_]*)"});
    }
    std::string shown;
    if (static_cast<unsigned char>(c) < 0x20 || static_cast<unsigned char>(c) >= 0x7F) {
      std::ostringstream os;
      os << "byte 0x" << std::hex << static_cast<int>(static_cast<unsigned char>(c));
      shown = os.str();
    } else {
      shown = std::string("'") + c + "'";
    }
    throw UnknownSymbol({ErrorKind::UnknownSymbol, start + 1, "", "unexpected symbol " + shown});
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  Token tok_;
  bool cached_ = false;
};

/// Local check on one And node: flattens its conjunction chain and looks for
/// a pair (x, negate(x)).
bool conjunction_contradicts(const Formula& f) {
  if (f.op() != Op::And) return false;
  std::vector<Formula> conjuncts;
  std::vector<Formula> stack{f};
  while (!stack.empty()) {
    Formula g = stack.back();
    stack.pop_back();
    if (g.op() == Op::And) {
      stack.push_back(g.rhs());
      stack.push_back(g.lhs());
    } else {
      conjuncts.push_back(g);
    }
  }
  for (std::size_t i = 0; i < conjuncts.size(); ++i) {
    const Formula neg = Formula::negate(conjuncts[i]);
    for (std::size_t j = 0; j < conjuncts.size(); ++j) {
      if (i != j && conjuncts[j] == neg) return true;
    }
  }
  return false;
}

// Nesting limit keeps the recursive descent from exhausting the stack on
// adversarial input.
constexpr std::size_t kMaxNesting = 1000;
constexpr std::size_t kMaxDepth = 4096;

class Parser {
 public:
  Parser(std::string_view src, bool track_contradictions)
      : lex_(src), track_(track_contradictions) {}

  Formula parse_all() {
    Formula f = parse_or();
    const Token& t = lex_.peek();
    if (t.kind != Tok::End) {
      throw SyntaxError({ErrorKind::Syntax, t.column, "end of input", "unexpected " + describe(t)});
    }
    return f;
  }

  std::optional<std::size_t> contradiction_column() const { return contradiction_; }

 private:
  void note(const Formula& f, std::size_t column, bool full_scan) {
    if (f.depth() > kMaxDepth) {
      throw SyntaxError({ErrorKind::Syntax, column, "", "formula nested too deeply"});
    }
    if (!track_ || contradiction_) return;
    if (full_scan ? has_shallow_contradiction(f) : conjunction_contradicts(f)) contradiction_ = column;
  }

  struct DepthGuard {
    explicit DepthGuard(Parser& p, std::size_t column) : p_(p) {
      if (++p_.nesting_ > kMaxNesting) {
        throw SyntaxError({ErrorKind::Syntax, column, "", "formula nested too deeply"});
      }
    }
    ~DepthGuard() { --p_.nesting_; }
    Parser& p_;
  };

  Formula parse_or() {
    const std::size_t start = lex_.peek().column;
    Formula lhs = parse_and();
    while (lex_.peek().kind == Tok::Or) {
      lex_.next();
      Formula rhs = parse_and();
      lhs = Formula::disj(lhs, rhs);
      note(lhs, start, false);
    }
    return lhs;
  }

  Formula parse_and() {
    const std::size_t start = lex_.peek().column;
    Formula lhs = parse_until();
    while (lex_.peek().kind == Tok::And) {
      lex_.next();
      Formula rhs = parse_until();
      lhs = Formula::conj(lhs, rhs);
      note(lhs, start, false);
    }
    return lhs;
  }

  Formula parse_until() {
    const std::size_t start = lex_.peek().column;
    DepthGuard guard(*this, start);
    Formula lhs = parse_unary();
    if (lex_.peek().kind == Tok::Until) {
      lex_.next();
      Formula rhs = parse_until();
      Formula f = Formula::until(lhs, rhs);
      note(f, start, false);
      return f;
    }
    return lhs;
  }

  Formula parse_unary() {
    const Token& t = lex_.peek();
    const std::size_t start = t.column;
    DepthGuard guard(*this, start);
    switch (t.kind) {
      case Tok::Not: {
        lex_.next();
        Formula f = Formula::negate(parse_unary());
        note(f, start, true);
        return f;
      }
      case Tok::Eventually:
      case Tok::Globally: {
        const bool eventually = t.kind == Tok::Eventually;
        lex_.next();
        Formula operand = parse_unary();
        Formula f = eventually ? Formula::eventually(operand) : Formula::globally(operand);
        note(f, start, false);
        return f;
      }
      default:
        return parse_primary();
    }
  }

  Formula parse_primary() {
    Token t = lex_.next();
    switch (t.kind) {
      case Tok::Atom:
        return Formula::atom(t.text);
      case Tok::LParen: {
        Formula f = parse_or();
        Token close = lex_.next();
        if (close.kind != Tok::RParen) {
          throw SyntaxError({ErrorKind::Syntax, close.column, "')'", "unexpected " + describe(close)});
        }
        return f;
      }
      default:
        throw SyntaxError({ErrorKind::Syntax, t.column, "proposition, '(', '!', 'F' or 'G'",
                           "unexpected " + describe(t)});
    }
  }

  Lexer lex_;
  bool track_;
  std::optional<std::size_t> contradiction_;
  std::size_t nesting_ = 0;
};

bool is_blank(std::string_view text) {
  return std::all_of(text.begin(), text.end(),
                     [](char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r'; });
}

void print_into(const FormulaNode& n, std::string& out) {
  switch (n.op) {
    case Op::Atom:
      out += n.name;
      return;
    case Op::Not:
      out += '!';
      print_into(*n.lhs, out);
      return;
    case Op::Eventually:
    case Op::Globally:
      out += n.op == Op::Eventually ? "F(" : "G(";
      print_into(*n.lhs, out);
      out += ')';
      return;
    case Op::And:
    case Op::Or:
    case Op::Until:
      out += '(';
      print_into(*n.lhs, out);
      out += n.op == Op::And ? " & " : n.op == Op::Or ? " | " : " U ";
      print_into(*n.rhs, out);
      out += ')';
      return;
  }
}

void collect_props(const FormulaNode& n, std::vector<std::string>& out) {
  if (n.op == Op::Atom) {
    if (std::find(out.begin(), out.end(), n.name) == out.end()) out.push_back(n.name);
    return;
  }
  if (n.lhs) collect_props(*n.lhs, out);
  if (n.rhs) collect_props(*n.rhs, out);
}

}  // namespace

Formula parse(std::string_view text) {
  if (is_blank(text)) throw EmptyFormula({ErrorKind::EmptyFormula, 1, "", "formula is empty"});
  return Parser(text, false).parse_all();
}

std::string print(const Formula& f) {
  std::string out;
  print_into(f.node(), out);
  return out;
}

std::string print_bare(const Formula& f) {
  std::string out = print(f);
  if (f.op() == Op::And || f.op() == Op::Or || f.op() == Op::Until) {
    return out.substr(1, out.size() - 2);
  }
  return out;
}

std::vector<std::string> extract_props(const Formula& f) {
  std::vector<std::string> out;
  collect_props(f.node(), out);
  return out;
}

bool has_shallow_contradiction(const Formula& f) {
  if (conjunction_contradicts(f)) return true;
  if (f.op() == Op::Atom || f.op() == Op::Not) return false;
  if (has_shallow_contradiction(f.lhs())) return true;
  return f.node().rhs && has_shallow_contradiction(f.rhs());
}

ValidationResult validate(std::string_view text) noexcept {
  ValidationResult result;
  try {
    if (is_blank(text)) {
      result.diagnostic = Diagnostic{ErrorKind::EmptyFormula, 1, "", "formula is empty"};
      return result;
    }
    Parser parser(text, true);
    Formula f = parser.parse_all();
    if (auto col = parser.contradiction_column()) {
      result.diagnostic = Diagnostic{ErrorKind::Contradiction, *col, "",
                                     "conjunction contains a subformula and its negation"};
      return result;
    }
    result.formula = std::move(f);
  } catch (const LtlError& e) {
    result.diagnostic = e.diagnostic();
  } catch (const std::exception& e) {
    result.diagnostic = Diagnostic{ErrorKind::Syntax, 1, "", e.what()};
  } catch (...) {
    result.diagnostic = Diagnostic{ErrorKind::Syntax, 1, "", "unknown parser failure"};
  }
  return result;
}

// ---------------------------------------------------------------------------
// Traces and evaluation

Trace::Trace(std::vector<std::vector<std::string>> steps) : steps_(std::move(steps)) {
  for (auto& s : steps_) {
    for (const auto& p : s) {
      if (!is_valid_atom_name(p)) {
        throw UnknownSymbol({ErrorKind::UnknownSymbol, 1, "", "invalid proposition '" + p + "' in trace"});
      }
    }
    std::sort(s.begin(), s.end());
    s.erase(std::unique(s.begin(), s.end()), s.end());
  }
}

bool Trace::holds(std::size_t i, std::string_view prop) const {
  const auto& s = steps_.at(i);
  return std::binary_search(s.begin(), s.end(), prop);
}

namespace {

bool eval_at(const FormulaNode& n, const Trace& t, std::size_t i) {
  const std::size_t len = t.size();
  switch (n.op) {
    case Op::Atom:
      return t.holds(i, n.name);
    case Op::Not:
      return !eval_at(*n.lhs, t, i);
    case Op::And:
      return eval_at(*n.lhs, t, i) && eval_at(*n.rhs, t, i);
    case Op::Or:
      return eval_at(*n.lhs, t, i) || eval_at(*n.rhs, t, i);
    case Op::Globally:
      for (std::size_t j = i; j < len; ++j) {
        if (!eval_at(*n.lhs, t, j)) return false;
      }
      return true;
    case Op::Eventually:
      for (std::size_t j = i; j < len; ++j) {
        if (eval_at(*n.lhs, t, j)) return true;
      }
      return false;
    case Op::Until:
      // Scan forward: succeed at the first rhs hit, fail at the first lhs miss.
      for (std::size_t j = i; j < len; ++j) {
        if (eval_at(*n.rhs, t, j)) return true;
        if (!eval_at(*n.lhs, t, j)) return false;
      }
      return false;
  }
  return false;
}

}  // namespace

bool eval_trace(const Formula& f, const Trace& t, std::size_t i) {
  if (i >= t.size()) {
    throw IndexOutOfRange("trace position " + std::to_string(i) + " out of range for trace of length " +
                          std::to_string(t.size()));
  }
  return eval_at(f.node(), t, i);
}

}  // namespace planverify::ltl
