#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "nullq/datalog.hpp"
#include "nullq/egd.hpp"
#include "nullq/formula.hpp"
#include "nullq/normal_form.hpp"

namespace nullq {

/// A conjunction of equalities γ(ȳ) over variables ȳ and constants.
struct EqualityTheory {
  std::vector<std::string> vars;
  std::vector<std::pair<Term, Term>> equalities;
  std::set<Value> constants;

  static EqualityTheory of(const NrvCq& cq);

  /// Classes of ∼_γ over ȳ ∪ adom(γ), each sorted, listed in canonical
  /// order.  Singletons included.
  std::vector<std::vector<Term>> classes() const;
  std::size_t class_count() const { return classes().size(); }
};

/// How equiv_γ(ȳ, z, z′) is spelled inside comp/imply/poss: either as an
/// atom over the idb relation of a Datalog program, or as the
/// quantifier-free equivFO_γ formula.
class EquivEncoding {
 public:
  virtual ~EquivEncoding() = default;
  virtual Formula apply(const std::vector<Term>& params, const Term& z, const Term& z2) const = 0;
  virtual const EqualityTheory& theory() const = 0;
};

class DatalogEquiv final : public EquivEncoding {
 public:
  DatalogEquiv(EqualityTheory gamma, std::string relation)
      : gamma_(std::move(gamma)), relation_(std::move(relation)) {}
  Formula apply(const std::vector<Term>& params, const Term& z, const Term& z2) const override;
  const EqualityTheory& theory() const override { return gamma_; }
  const std::string& relation() const noexcept { return relation_; }

 private:
  EqualityTheory gamma_;
  std::string relation_;
};

class FoEquiv final : public EquivEncoding {
 public:
  explicit FoEquiv(EqualityTheory gamma) : gamma_(std::move(gamma)) {}
  Formula apply(const std::vector<Term>& params, const Term& z, const Term& z2) const override;
  const EqualityTheory& theory() const override { return gamma_; }

 private:
  EqualityTheory gamma_;
};

/// Rules of equiv_γ as the five-part template: reflexivity over Dom, one
/// rule per equality of γ, transitivity, symmetry, one rule per EGD.
std::vector<Rule> build_equiv_program(const EqualityTheory& gamma, const EgdSet& sigma,
                                      const std::string& relation, const std::string& dom);

/// equivFO_γ(ȳ, z, z′) with ȳ := `params`.  Chains through distinct ∼_γ
/// classes only, which is logically equivalent to the full chain
/// disjunction and has no duplicate disjuncts.
Formula build_equiv_fo(const EqualityTheory& gamma, const std::vector<Term>& params,
                       const Term& z, const Term& z2);

/// comp_γ(params) := ∀zz′ (equiv(params,z,z′) ∧ ¬Null(z) ∧ ¬Null(z′) → z = z′)
Formula build_comp(const EquivEncoding& equiv, const std::vector<Term>& params,
                   NameSupply& names);

/// imply_{γ,γ′}(params, params2) := ∀zz′ (equiv_γ′(params2,z,z′) → equiv_γ(params,z,z′))
Formula build_imply(const EquivEncoding& gamma, const std::vector<Term>& params,
                    const EquivEncoding& gamma2, const std::vector<Term>& params2,
                    NameSupply& names);

/// Produces the equiv encoding for one CQ's equality subquery.
using EquivFactory = std::function<std::shared_ptr<const EquivEncoding>(const NrvCq&)>;

struct PossFormulas {
  Formula poss;  // over x̄ w̄ of the positive CQ
  Formula cons;
};

/// poss_{Q_i}(x̄w̄) := q_{i0}(w̄) ∧ comp_{γ_{i0}}(x̄w̄) ∧ cons_{Q_i}(x̄w̄), where
/// cons requires every negated CQ match that is itself compatible to be
/// not implied by γ_{i0}.
PossFormulas build_poss(const DnfDisjunct& disjunct, const EquivFactory& encode,
                        NameSupply& names);

enum class RewriteTarget : std::uint8_t { Datalog, Fo };

const char* to_string(RewriteTarget t);

struct RewriteOptions {
  /// Relations Dom(x) ranges over, in addition to those of the query and
  /// the constraints.  Needed when the data has further relations.
  Schema schema;
};

/// Compiled artifacts for one disjunct of ¬Q.
struct DisjunctArtifacts {
  std::vector<std::string> rel_vars;  // w̄ of the positive CQ
  Formula poss;
  Formula cons;
  std::vector<std::string> equiv_relations;  // datalog target only
};

/// The certain-answer rewriting ρ(x̄) of a BCCQ, as Datalog or FO.
struct RewritingBundle {
  RewriteTarget target = RewriteTarget::Fo;
  std::vector<std::string> answer_vars;
  DnfBccq negated;  // ¬Q in NRV-DNF
  std::vector<DisjunctArtifacts> disjuncts;
  Formula rho;
  DatalogProgram program;  // datalog target: rules + ρ as FO layer

  /// Program text (datalog) or formula text (fo).
  std::string to_text() const;
};

/// cert_Σ(Q, ·) as ρ(x̄) = ⋀_i ∀w̄ ¬poss_{Q′_i}(x̄w̄) with Q′ = ¬Q in DNF.
/// Throws ClassificationError for non-BCCQs, UnsupportedError for the fo
/// target with non-empty Σ.
RewritingBundle rewrite_certain(const Query& q, const EgdSet& sigma, RewriteTarget target,
                                const RewriteOptions& options = {});

/// Evaluate a bundle: datalog through the program engine, fo through the
/// naive evaluator.
TupleSet evaluate_bundle(const RewritingBundle& bundle, const Database& d,
                         ProgramOptions options = {});

}  // namespace nullq
