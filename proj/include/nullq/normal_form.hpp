#pragma once

#include <set>
#include <string>
#include <utility>
#include <vector>

#include "nullq/formula.hpp"

namespace nullq {

/// Conjunctive query in non-repeating-variable normal form:
///   ∃w̄ (q(w̄) ∧ e(x̄, w̄))
/// `atoms` use only variables of w̄, each at most once overall; all
/// joins, selections and answer bindings live in `equalities`.
struct NrvCq {
  struct Atom {
    std::string relation;
    std::vector<std::string> vars;
    friend bool operator==(const Atom&, const Atom&) = default;
  };

  std::vector<std::string> free_vars;  // x̄
  std::vector<std::string> rel_vars;   // w̄
  std::vector<Atom> atoms;             // q(w̄)
  std::vector<std::pair<Term, Term>> equalities;  // e(x̄, w̄)

  std::set<Value> constants() const;
  /// x̄ followed by w̄: the parameter order of the equality subquery.
  std::vector<std::string> parameters() const;
  Formula relational_subquery() const;
  Formula equality_subquery() const;
  Formula to_formula() const;
  /// Empty string when the structural invariants hold, else a reason.
  std::string check_invariants() const;
  /// Rename w̄ (not x̄) to names drawn from `names`.
  NrvCq rename_apart(NameSupply& names, const std::string& base = "w") const;
  /// Add `c = c` for every constant of `target` missing from the
  /// equality subquery.
  void pad_constants(const std::set<Value>& target);

  friend bool operator==(const NrvCq&, const NrvCq&) = default;
};

/// One disjunct Q_{i0} ∧ ¬Q_{i1} ∧ … ∧ ¬Q_{im}.
struct DnfDisjunct {
  NrvCq positive;
  std::vector<NrvCq> negated;
};

/// A BCCQ in disjunctive normal form over NRV conjunctive queries.  The
/// rel-vars of every CQ are distinct across the whole structure and all
/// CQs of a disjunct share one constant set.
struct DnfBccq {
  std::vector<std::string> answer_vars;
  std::vector<DnfDisjunct> disjuncts;

  Formula to_formula() const;
};

/// NRV form of a conjunctive query with answer variables `answer_vars`
/// (a superset of its free variables; extras get dummy `x = x`).  Throws
/// ClassificationError for non-CQ input and UnsupportedError when a
/// variable of the CQ occurs in no relational atom.
NrvCq to_nrv(const Formula& cq, const std::vector<std::string>& answer_vars);
NrvCq to_nrv(const Query& cq);

/// Trivial CQ: no atoms, only `x = x` dummies.  Always true.
NrvCq trivial_cq(const std::vector<std::string>& answer_vars);

/// DNF of `q` (or of `¬q` when `negate`).  Throws ClassificationError for
/// non-BCCQ input.
DnfBccq to_dnf_bccq(const Query& q, bool negate);

/// UCQ as a list of NRV disjuncts with a common constant set.  Throws
/// ClassificationError for non-UCQ input.
std::vector<NrvCq> to_nrv_ucq(const Query& q);

}  // namespace nullq
