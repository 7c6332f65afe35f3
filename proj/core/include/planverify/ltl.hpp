// ltl.hpp - LTL formulas over finite plan traces.
//
// Grammar handled by the parser:
//
//   formula := formula '|' formula | formula '&' formula
//            | formula 'U' formula | 'F' formula | 'G' formula
//            | '!' formula | '(' formula ')' | atom
//
// Precedence, tightest first: ! > F/G > U > & > |.  U is right-associative,
// & and | are left-associative.  Word aliases `and`, `or`, `not` and the
// Unicode symbols for conjunction, disjunction and negation are accepted on
// input; output is always ASCII.
//
// Formulas are kept in negation normal form: a Not node only ever wraps an
// atom.  Negating a compound formula pushes the negation down with
// De Morgan and the finite-trace dualities
//
//   !F a      == G !a
//   !G a      == F !a
//   !(a U b)  == G !b | (!b U (!a & !b))
//
// Evaluation uses finite-trace (LTLf) semantics: temporal operators only
// quantify over the remaining steps of the trace.
#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace planverify::ltl {

enum class Op { Atom, Not, And, Or, Globally, Eventually, Until };

/// True when `name` matches [a-z][a-z0-9_]* and is not a reserved word.
bool is_valid_atom_name(std::string_view name);

struct FormulaNode {
  Op op = Op::Atom;
  std::string name;  // atoms only
  std::shared_ptr<const FormulaNode> lhs;
  std::shared_ptr<const FormulaNode> rhs;
  std::size_t depth = 1;
  std::size_t size = 1;
};

/// Immutable, structurally shared formula tree.  Cheap to copy.
class Formula {
 public:
  static Formula atom(std::string name);
  /// Negation in NNF; never produces a Not above a compound formula.
  static Formula negate(const Formula& f);
  static Formula conj(const Formula& lhs, const Formula& rhs);
  static Formula disj(const Formula& lhs, const Formula& rhs);
  static Formula globally(const Formula& f);
  static Formula eventually(const Formula& f);
  static Formula until(const Formula& lhs, const Formula& rhs);

  Op op() const noexcept { return node_->op; }
  /// Atom name; empty for non-atoms.
  const std::string& name() const noexcept { return node_->name; }
  /// Operand of unary nodes, left operand of binary nodes.
  Formula lhs() const;
  Formula rhs() const;
  std::size_t depth() const noexcept { return node_->depth; }
  std::size_t size() const noexcept { return node_->size; }
  const FormulaNode& node() const noexcept { return *node_; }

  friend bool operator==(const Formula& a, const Formula& b);

 private:
  explicit Formula(std::shared_ptr<const FormulaNode> node) : node_(std::move(node)) {}
  static Formula make(Op op, std::shared_ptr<const FormulaNode> lhs,
                      std::shared_ptr<const FormulaNode> rhs);
  std::shared_ptr<const FormulaNode> node_;
};

// ---------------------------------------------------------------------------
// Errors

enum class ErrorKind { Syntax, EmptyFormula, UnknownSymbol, Contradiction };

std::string_view to_string(ErrorKind kind);

struct Diagnostic {
  ErrorKind kind = ErrorKind::Syntax;
  std::size_t column = 1;  // 1-based byte column
  std::string expected;    // expected token, syntax errors only
  std::string message;

  std::string to_string() const;
};

class LtlError : public std::runtime_error {
 public:
  explicit LtlError(Diagnostic d);
  const Diagnostic& diagnostic() const noexcept { return diag_; }
  std::size_t column() const noexcept { return diag_.column; }

 private:
  Diagnostic diag_;
};

class SyntaxError : public LtlError {
 public:
  using LtlError::LtlError;
};
class EmptyFormula : public LtlError {
 public:
  using LtlError::LtlError;
};
class UnknownSymbol : public LtlError {
 public:
  using LtlError::LtlError;
};

// ---------------------------------------------------------------------------
// Text format

/// Parses `text` into NNF.  Throws SyntaxError, EmptyFormula or UnknownSymbol.
Formula parse(std::string_view text);

/// Canonical, fully parenthesized ASCII form; parse(print(f)) == f.
std::string print(const Formula& f);

/// print() without the outermost pair of parentheses.
std::string print_bare(const Formula& f);

/// Distinct atom names in first-occurrence, depth-first, left-to-right order.
std::vector<std::string> extract_props(const Formula& f);

struct ValidationResult {
  std::optional<Formula> formula;
  std::optional<Diagnostic> diagnostic;

  bool ok() const noexcept { return formula.has_value(); }
};

/// Parses and rejects shallow contradictions (a conjunction containing some
/// x together with the NNF of !x).  Never throws.
ValidationResult validate(std::string_view text) noexcept;

/// True if some And node of `f` has conjuncts x and negate(x).
bool has_shallow_contradiction(const Formula& f);

// ---------------------------------------------------------------------------
// Finite traces

/// One proposition set per plan step.
class Trace {
 public:
  Trace() = default;
  /// Throws UnknownSymbol on an invalid proposition name.
  explicit Trace(std::vector<std::vector<std::string>> steps);

  std::size_t size() const noexcept { return steps_.size(); }
  bool empty() const noexcept { return steps_.empty(); }
  const std::vector<std::string>& step(std::size_t i) const { return steps_.at(i); }
  bool holds(std::size_t i, std::string_view prop) const;

  friend bool operator==(const Trace&, const Trace&) = default;

 private:
  std::vector<std::vector<std::string>> steps_;  // each sorted, deduplicated
};

/// Finite-trace truth of `f` at step `i`.  Throws IndexOutOfRange if
/// i >= t.size().
bool eval_trace(const Formula& f, const Trace& t, std::size_t i = 0);

}  // namespace planverify::ltl
