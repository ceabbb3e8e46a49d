#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <memory>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "nullq/database.hpp"
#include "nullq/formula.hpp"

namespace nullq {

/// Dense numbering of the values an evaluation ranges over.
class Domain {
 public:
  int intern(const Value& v);
  /// -1 when `v` was never interned.
  int find(const Value& v) const;
  const Value& value(int id) const { return values_.at(static_cast<std::size_t>(id)); }
  bool is_null(int id) const { return values_[static_cast<std::size_t>(id)].is_null(); }
  std::size_t size() const noexcept { return values_.size(); }

 private:
  std::vector<Value> values_;
  std::map<Value, int> ids_;
};

/// A relation computed on demand rather than stored, e.g. an equivalence
/// closure parameterized by a prefix of its columns.  Works on Domain ids.
class VirtualRelation {
 public:
  virtual ~VirtualRelation() = default;
  virtual std::size_t arity() const = 0;
  /// Number of leading columns that must be bound before `match` may be
  /// used as a generator.
  virtual std::size_t bound_prefix() const = 0;
  virtual bool contains(std::span<const int> tuple) const = 0;
  /// Calls `out` with each full tuple extending `prefix`; stops early when
  /// `out` returns true and then returns true.
  virtual bool match(std::span<const int> prefix,
                     const std::function<bool(std::span<const int>)>& out) const = 0;
};

struct EvalOptions {
  /// Bind quantified variables from relational atoms and equalities
  /// instead of enumerating the active domain.  Both modes compute the
  /// same answers; exhaustive mode exists to cross-check the guided one.
  bool guided = true;
};

class EvalContext;

/// Active-domain evaluation of FO formulas over one database, with nulls
/// treated as pairwise distinct fresh constants and `isnull` interpreted
/// by the database's nulls.  Quantifiers range over adom(D) ∪ adom(φ) ∪
/// `extra_constants`.
class Evaluator {
 public:
  explicit Evaluator(const Database& d, std::set<Value> extra_constants = {},
                     EvalOptions options = {});
  ~Evaluator();
  Evaluator(Evaluator&&) noexcept;
  Evaluator& operator=(Evaluator&&) noexcept;

  Domain& domain();
  /// Register a relation that is not stored in the database.  The name
  /// must not clash with a stored relation.
  void add_virtual(const std::string& name, std::shared_ptr<VirtualRelation> rel);

  /// All tuples over the active domain, in the order of `vars`, that
  /// satisfy `f`.  Free variables of `f` must be among `vars`.
  TupleSet answers(const Formula& f, const std::vector<std::string>& vars);
  /// Truth of `f` under a binding of its free variables.
  bool satisfies(const Formula& f, const std::map<std::string, Value>& binding);

 private:
  std::unique_ptr<EvalContext> ctx_;
  std::set<Value> extra_;
};

/// Answers of `q` on `d` in the order of its free variables.  Boolean
/// queries yield {} (false) or {()} (true).
TupleSet eval_fo(const Formula& q, const Database& d, EvalOptions options = {});
TupleSet eval_fo(const Query& q, const Database& d, EvalOptions options = {});

/// Schema check of a formula against a database: every relation the
/// formula uses must be declared with the same arity, or be absent from
/// the database (then it is empty).  Throws SchemaError.
void check_schema(const Schema& used, const Database& d);

}  // namespace nullq
