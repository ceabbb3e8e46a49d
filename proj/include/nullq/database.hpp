#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>

#include "nullq/value.hpp"

namespace nullq {

using Schema = std::map<std::string, std::size_t>;

/// A finite relational database over constants and marked nulls with set
/// semantics.  Relations are declared with an arity before (or while)
/// facts are inserted; inserting a tuple of the wrong length throws.
class Database {
 public:
  Database() = default;
  explicit Database(const Schema& schema);

  /// Declare `name/arity`.  Redeclaring with the same arity is a no-op.
  void declare(const std::string& name, std::size_t arity);
  void declare(const Schema& schema);
  void insert(const std::string& name, Tuple tuple);

  const Schema& schema() const noexcept { return schema_; }
  std::optional<std::size_t> arity(const std::string& name) const;
  bool has_relation(const std::string& name) const { return schema_.contains(name); }

  /// Tuples of `name`; empty for undeclared names.
  const TupleSet& relation(const std::string& name) const;
  const std::map<std::string, TupleSet>& relations() const noexcept { return relations_; }

  std::size_t size() const;
  std::set<Value> active_domain() const;
  std::set<Value> constants() const;
  std::set<Value> nulls() const;
  bool is_complete() const;

  /// One fact per line, relations and tuples in canonical order.
  std::string to_text() const;

  friend bool operator==(const Database&, const Database&) = default;

 private:
  Schema schema_;
  std::map<std::string, TupleSet> relations_;
};

/// Parse the fact format: `R(1, _n1, "a").` per fact, `#` comments.
Database parse_database(std::string_view text);

/// A total map from null names to constants.
class Valuation {
 public:
  Valuation() = default;
  explicit Valuation(std::map<std::string, Value> mapping);

  void assign(const std::string& null_name, Value constant);
  const std::map<std::string, Value>& mapping() const noexcept { return mapping_; }
  std::optional<Value> image(const std::string& null_name) const;

  Value apply(const Value& v) const;
  Tuple apply(const Tuple& t) const;

  friend auto operator<=>(const Valuation&, const Valuation&) = default;

 private:
  std::map<std::string, Value> mapping_;
};

/// Replace every null of `d` by its image under `v`.  Throws DomainError
/// when `v` is not total on Null(d).
Database apply_valuation(const Valuation& v, const Database& d);

/// Apply an injective renaming of nulls (used to state genericity
/// properties).  Values absent from the map are untouched.
Database rename_values(const Database& d, const std::map<Value, Value>& renaming);

}  // namespace nullq
