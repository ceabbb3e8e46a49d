#include "nullq/best.hpp"

#include <map>

#include "nullq/errors.hpp"
#include "nullq/eval.hpp"

namespace nullq {

namespace {

// A copy of `cq` with fresh relational variables, given as (atoms, w̄).
struct Instance {
  NrvCq cq;
  std::vector<Term> params;
};

Instance instantiate(const NrvCq& cq, const std::vector<Term>& free, NameSupply& names) {
  Instance in;
  in.cq = cq.rename_apart(names, "v");
  in.params = free;
  for (const auto& w : in.cq.rel_vars) in.params.push_back(Term::var(w));
  return in;
}

}  // namespace

Formula build_support_inclusion(const std::vector<NrvCq>& ucq, const std::vector<Term>& left,
                                const std::vector<Term>& right, const EquivFactory& encode,
                                NameSupply& names) {
  std::vector<std::shared_ptr<const EquivEncoding>> enc;
  for (const auto& cq : ucq) enc.push_back(encode(cq));
  std::vector<Formula> conjuncts;
  for (std::size_t i = 0; i < ucq.size(); ++i) {
    Instance a = instantiate(ucq[i], left, names);
    Formula guard =
        Formula::conj({a.cq.relational_subquery(), build_comp(*enc[i], a.params, names)});
    std::vector<Formula> options;
    for (std::size_t j = 0; j < ucq.size(); ++j) {
      Instance b = instantiate(ucq[j], right, names);
      options.push_back(Formula::exists(
          b.cq.rel_vars, Formula::conj({b.cq.relational_subquery(),
                                        build_imply(*enc[i], a.params, *enc[j], b.params, names)})));
    }
    conjuncts.push_back(
        Formula::forall(a.cq.rel_vars, Formula::implies(guard, Formula::disj(std::move(options)))));
  }
  return Formula::conj(std::move(conjuncts));
}

namespace {

struct Setup {
  std::vector<NrvCq> ucq;
  NameSupply names;
  std::vector<Term> left;
  std::vector<Term> right;
  std::vector<std::string> right_names;
};

Setup setup(const Query& q) {
  if (classify(q.formula) > QueryClass::UCQ)
    throw ClassificationError("best-answer rewriting needs a UCQ, got " +
                              std::string(to_string(classify(q.formula))));
  Setup s;
  s.ucq = to_nrv_ucq(q);
  s.names.reserve(q.formula.all_variables());
  for (const auto& cq : s.ucq)
    for (const auto& v : cq.parameters()) s.names.reserve(v);
  for (const auto& x : q.answer_vars) {
    s.names.reserve(x);
    s.left.push_back(Term::var(x));
  }
  for (const auto& x : q.answer_vars) {
    s.right_names.push_back(s.names.fresh(x + "p"));
    s.right.push_back(Term::var(s.right_names.back()));
  }
  return s;
}

EquivFactory fo_factory() {
  return [](const NrvCq& cq) -> std::shared_ptr<const EquivEncoding> {
    return std::make_shared<FoEquiv>(EqualityTheory::of(cq));
  };
}

Formula best_formula(Setup& s, const EquivFactory& encode) {
  Formula fwd = build_support_inclusion(s.ucq, s.left, s.right, encode, s.names);
  Formula back = build_support_inclusion(s.ucq, s.right, s.left, encode, s.names);
  return Formula::forall(s.right_names, Formula::implies(fwd, back));
}

}  // namespace

SupportInclusion build_support_inclusion(const Query& q) {
  Setup s = setup(q);
  SupportInclusion out;
  out.formula = build_support_inclusion(s.ucq, s.left, s.right, fo_factory(), s.names);
  out.left = q.answer_vars;
  out.right = s.right_names;
  return out;
}

Formula rewrite_best(const Query& q) {
  Setup s = setup(q);
  return best_formula(s, fo_factory());
}

DatalogProgram rewrite_best_program(const Query& q, const BestOptions& options) {
  Setup s = setup(q);
  Schema schema = options.rewrite.schema;
  for (const auto& [r, a] : q.formula.relations()) schema.emplace(r, a);
  for (const auto& [r, a] : relations(options.sigma)) schema.emplace(r, a);
  NameSupply rel_names;
  for (const auto& [r, _] : schema) rel_names.reserve(r);
  std::string dom = rel_names.fresh("Dom");
  DatalogProgram p;
  std::map<std::size_t, std::shared_ptr<const EquivEncoding>> cache;
  EquivFactory encode = [&](const NrvCq& cq) -> std::shared_ptr<const EquivEncoding> {
    for (std::size_t i = 0; i < s.ucq.size(); ++i)
      if (s.ucq[i] == cq && cache.contains(i)) return cache[i];
    EqualityTheory g = EqualityTheory::of(cq);
    std::string rel = rel_names.next("equiv");
    auto rules = build_equiv_program(g, options.sigma, rel, dom);
    p.rules.insert(p.rules.end(), rules.begin(), rules.end());
    auto enc = std::make_shared<DatalogEquiv>(std::move(g), rel);
    for (std::size_t i = 0; i < s.ucq.size(); ++i)
      if (s.ucq[i] == cq) cache[i] = enc;
    return enc;
  };
  p.fo_layer = best_formula(s, encode);
  auto dom_rules = domain_rules(dom, schema, q.formula.constants());
  p.rules.insert(p.rules.begin(), dom_rules.begin(), dom_rules.end());
  p.answer_vars = q.answer_vars;
  return p;
}

TupleSet evaluate_best(const Query& q, const Database& d, const BestOptions& options) {
  if (!options.sigma.empty() && !options.experimental_egds)
    throw UnsupportedError("best answers under constraints need the experimental EGD mode");
  if (options.experimental_egds) {
    BestOptions o = options;
    for (const auto& [r, a] : d.schema()) o.rewrite.schema.emplace(r, a);
    return eval_program(rewrite_best_program(q, o), d);
  }
  Formula f = rewrite_best(q);
  check_schema(f.relations(), d);
  Evaluator ev(d);
  return ev.answers(f, q.answer_vars);
}

}  // namespace nullq
