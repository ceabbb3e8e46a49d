#pragma once

#include <cstdint>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "nullq/database.hpp"
#include "nullq/value.hpp"

namespace nullq {

/// A variable or a constant.  Terms never hold nulls: queries and
/// rewritings are data-independent.
struct Term {
  enum class Kind : std::uint8_t { Var, Const };

  Kind kind = Kind::Var;
  std::string name;  // variable name when kind == Var
  Value value;       // constant when kind == Const

  static Term var(std::string n) { return Term{Kind::Var, std::move(n), {}}; }
  static Term constant(Value v) { return Term{Kind::Const, {}, std::move(v)}; }

  bool is_var() const noexcept { return kind == Kind::Var; }
  bool is_const() const noexcept { return kind == Kind::Const; }

  std::string to_string() const { return is_var() ? name : value.to_string(); }

  friend bool operator==(const Term&, const Term&) = default;
  friend auto operator<=>(const Term& a, const Term& b) {
    if (auto c = a.kind <=> b.kind; c != 0) return c;
    if (auto c = a.name <=> b.name; c != 0) return c;
    return a.value <=> b.value;
  }
};

enum class NodeKind : std::uint8_t { True, False, Atom, Eq, IsNull, Not, And, Or, Exists, Forall };

/// Immutable first-order formula.  Cheap to copy (shared structure).
///
/// `IsNull(t)` holds iff `t` denotes a null of the database; it only
/// appears in generated rewritings.
class Formula {
 public:
  struct Node {
    NodeKind kind;
    std::string relation;           // Atom
    std::vector<Term> terms;        // Atom args, Eq lhs/rhs, IsNull arg
    std::vector<std::string> vars;  // Exists / Forall
    std::vector<Formula> children;  // Not (1), And/Or (n), quantifier body (1)
  };

  Formula();  // true

  static Formula truth();
  static Formula falsity();
  static Formula atom(std::string relation, std::vector<Term> args);
  static Formula eq(Term a, Term b);
  static Formula is_null(Term t);
  static Formula negate(Formula f);
  /// n-ary conjunction; empty → true, singleton → the element.
  static Formula conj(std::vector<Formula> fs);
  static Formula disj(std::vector<Formula> fs);
  static Formula exists(std::vector<std::string> vars, Formula body);
  static Formula forall(std::vector<std::string> vars, Formula body);
  /// `!a | b`.
  static Formula implies(Formula a, Formula b);

  NodeKind kind() const noexcept { return node_->kind; }
  const Node& node() const noexcept { return *node_; }
  const std::string& relation() const noexcept { return node_->relation; }
  const std::vector<Term>& terms() const noexcept { return node_->terms; }
  const std::vector<std::string>& bound_vars() const noexcept { return node_->vars; }
  const std::vector<Formula>& children() const noexcept { return node_->children; }
  const Formula& child(std::size_t i = 0) const { return node_->children.at(i); }

  /// Free variables in order of first occurrence (left to right).
  std::vector<std::string> free_variables() const;
  /// adom(φ): the constants occurring in the formula.
  std::set<Value> constants() const;
  /// Every variable name occurring, bound or free.
  std::set<std::string> all_variables() const;
  /// Relation names with the arity they are used at.  Throws SchemaError
  /// on inconsistent use.
  Schema relations() const;

  /// Text in the query grammar; `parse_query(to_string())` yields a
  /// structurally equal formula.
  std::string to_string() const;

  friend bool operator==(const Formula& a, const Formula& b);

 private:
  explicit Formula(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  static Formula make(Node n);

  std::shared_ptr<const Node> node_;
};

/// Capture-avoiding substitution of free variables by terms.
Formula substitute(const Formula& f, const std::map<std::string, Term>& subst);

enum class QueryClass : std::uint8_t { CQ = 0, UCQ = 1, BCCQ = 2, FO = 3 };

const char* to_string(QueryClass c);

/// Most specific fragment the formula syntactically belongs to.  A CQ is
/// built from atoms, equalities, `&` and `exists`; a UCQ additionally
/// allows `|`; a BCCQ is a Boolean combination of UCQs; everything else
/// (universal quantifiers over non-trivial bodies, negation under a
/// quantifier, `isnull`) is FO.
QueryClass classify(const Formula& f);

/// A parsed user query: formula, answer variables (free variables in
/// first-occurrence order), and its classification.
struct Query {
  Formula formula;
  std::vector<std::string> answer_vars;
  QueryClass query_class = QueryClass::FO;

  static Query from(Formula f);
  static Query from(Formula f, std::vector<std::string> answer_vars);

  bool is_boolean() const noexcept { return answer_vars.empty(); }
};

/// Generates variable names not present in a reserved set.
class NameSupply {
 public:
  NameSupply() = default;
  explicit NameSupply(std::set<std::string> reserved) : used_(std::move(reserved)) {}

  void reserve(const std::string& name) { used_.insert(name); }
  void reserve(const std::set<std::string>& names) { used_.insert(names.begin(), names.end()); }
  /// `base` if unused, otherwise `base_1`, `base_2`, ...
  std::string fresh(const std::string& base);
  /// Always numbered: `base1`, `base2`, ... skipping used names.
  std::string next(const std::string& base);

 private:
  std::set<std::string> used_;
  std::map<std::string, std::size_t> counters_;
};

}  // namespace nullq
