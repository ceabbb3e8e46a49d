#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "nullq/database.hpp"
#include "nullq/formula.hpp"

namespace nullq {

/// An EGD as written: relational atoms and variable equalities in the
/// body, one equality in the head.  Terms may repeat and (syntactically)
/// be constants; `normalize_egd` rejects what is not supported.
struct RawEgd {
  struct Atom {
    std::string relation;
    std::vector<Term> args;
  };
  std::vector<Atom> atoms;
  std::vector<std::pair<Term, Term>> equalities;
  std::pair<Term, Term> head;

  std::string to_string() const;
};

/// A normalized EGD ∀ū (φ(ū) ∧ ψ(ū) → z = z′): body atoms over pairwise
/// distinct variables, repetitions moved into `psi`, head naming two
/// distinct body variables.
struct Egd {
  struct Atom {
    std::string relation;
    std::vector<std::string> vars;
    friend bool operator==(const Atom&, const Atom&) = default;
  };
  std::vector<Atom> body;
  std::vector<std::pair<std::string, std::string>> psi;
  std::pair<std::string, std::string> head;

  /// Functional dependency `relation: lhs → rhs` (0-based positions).
  static Egd functional_dependency(const std::string& relation, std::size_t arity,
                                   const std::vector<std::size_t>& lhs, std::size_t rhs);

  std::vector<std::string> variables() const;
  Schema relations() const;
  RawEgd to_raw() const;
  /// `R(u1, u2) & R(u3, u4) & u1 = u3 -> u2 = u4 .`
  std::string to_string() const;

  friend bool operator==(const Egd&, const Egd&) = default;
};

using EgdSet = std::vector<Egd>;

/// Variable repetitions become equalities in ψ; the first occurrence of a
/// variable keeps its name so already-normalized EGDs come back
/// unchanged.  Throws UnsupportedError for constants and ValidationError
/// when head variables coincide or do not occur in the body.
Egd normalize_egd(const RawEgd& raw);

/// Parse one EGD per line: `R(x,y) & R(x,z) -> y = z .`, `#` comments.
EgdSet parse_constraints(std::string_view text);

/// Whether every EGD holds in `d` with nulls compared by name.  Callers
/// checking semantic consistency pass a complete database.  Throws
/// SchemaError when an EGD mentions a relation `d` does not declare or
/// uses it at the wrong arity.
bool satisfies_egds(const Database& d, const EgdSet& sigma);

/// Schema of all relations mentioned by `sigma`.
Schema relations(const EgdSet& sigma);

}  // namespace nullq
