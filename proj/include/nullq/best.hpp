#pragma once

#include <string>
#include <vector>

#include "nullq/certain.hpp"
#include "nullq/formula.hpp"

namespace nullq {

/// Q_⊆(x̄, x̄′): holds on D iff Supp(Q, D, x̄) ⊆ Supp(Q, D, x̄′).
struct SupportInclusion {
  Formula formula;
  std::vector<std::string> left;   // x̄
  std::vector<std::string> right;  // x̄′
};

struct BestOptions {
  /// Substitute the EGD-aware Datalog equiv relation into comp/imply.
  /// Unproven; only accepted where it agrees with the oracle.
  bool experimental_egds = false;
  EgdSet sigma;
  RewriteOptions rewrite;
};

/// Built over the given parameter terms so it can be instantiated with the
/// arguments swapped.  `encode` supplies the equiv encoding per disjunct.
Formula build_support_inclusion(const std::vector<NrvCq>& ucq, const std::vector<Term>& left,
                                const std::vector<Term>& right, const EquivFactory& encode,
                                NameSupply& names);

/// Q_⊆ for a UCQ with equivFO encodings (Σ = ∅).  Throws
/// ClassificationError for non-UCQs.
SupportInclusion build_support_inclusion(const Query& q);

/// best_Q(x̄) := ∀ȳ (Q_⊆(x̄, ȳ) → Q_⊆(ȳ, x̄)), as an FO formula.
Formula rewrite_best(const Query& q);

/// best_Q with the experimental EGD mode: a Datalog program whose FO
/// layer is best_Q over equiv relations built with `options.sigma`.
DatalogProgram rewrite_best_program(const Query& q, const BestOptions& options);

/// Evaluate best_Q on `d` in the query's answer-variable order.
TupleSet evaluate_best(const Query& q, const Database& d, const BestOptions& options = {});

}  // namespace nullq
