#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "nullq/database.hpp"
#include "nullq/formula.hpp"

namespace nullq {

/// Body literal of a positive rule: a relational atom or an equality.
struct BodyLiteral {
  enum class Kind : std::uint8_t { Atom, Eq };

  Kind kind = Kind::Atom;
  std::string relation;     // Atom
  std::vector<Term> terms;  // Atom args, or the two sides of an Eq

  static BodyLiteral atom(std::string rel, std::vector<Term> args) {
    return {Kind::Atom, std::move(rel), std::move(args)};
  }
  static BodyLiteral eq(Term a, Term b) { return {Kind::Eq, {}, {std::move(a), std::move(b)}}; }

  std::string to_string() const;
  friend bool operator==(const BodyLiteral&, const BodyLiteral&) = default;
};

/// `head :- body.`  An empty body makes a ground fact.
struct Rule {
  std::string head;
  std::vector<Term> head_terms;
  std::vector<BodyLiteral> body;

  std::string to_string() const;
  friend bool operator==(const Rule&, const Rule&) = default;
};

/// Two-stratum program: a negation-free (possibly recursive) rule set
/// defining idb relations, then an FO query over edb ∪ idb whose answers
/// are the program's answers, columns in `answer_vars` order.
struct DatalogProgram {
  std::vector<Rule> rules;
  Formula fo_layer;
  std::vector<std::string> answer_vars;

  Schema idb_schema() const;
  /// Constants of the rules and of the FO layer.
  std::set<Value> constants() const;

  friend bool operator==(const DatalogProgram& a, const DatalogProgram& b) {
    return a.rules == b.rules && a.fo_layer == b.fo_layer && a.answer_vars == b.answer_vars;
  }
};

enum class FixpointStrategy : std::uint8_t {
  Naive,      // re-derive everything each round
  SemiNaive,  // only joins touching last round's new facts
  Auto,       // semi-naive, with equivalence-closure predicates
              // evaluated lazily by union-find per parameter tuple
};

struct ProgramOptions {
  FixpointStrategy strategy = FixpointStrategy::Auto;
};

/// Throws ValidationError for unsafe rules, arity conflicts, or an idb
/// name that is also an edb relation of `d`.
void validate_program(const DatalogProgram& p, const Database& d);

/// Least fixpoint of the rules over `d` (nulls as constants), then the
/// FO layer evaluated naively over `d` extended by the idb relations.
TupleSet eval_program(const DatalogProgram& p, const Database& d, ProgramOptions options = {});

/// Only the first stratum: `d` extended with all idb relations.  Intended
/// for tests; always materializes (no lazy closures).
Database materialize_idb(const DatalogProgram& p, const Database& d,
                         FixpointStrategy strategy = FixpointStrategy::SemiNaive);

/// One rule per line, then `%% FO LAYER` and the formula.  Answer
/// variables are recorded in a `%% ANSWER` line.
std::string emit_text(const DatalogProgram& p);
DatalogProgram parse_program(std::string_view text);

/// Dom(x): one rule per position of each relation in `schema`, plus one
/// fact per constant.
std::vector<Rule> domain_rules(const std::string& dom, const Schema& schema,
                               const std::set<Value>& constants);

}  // namespace nullq
