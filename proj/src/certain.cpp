#include "nullq/certain.hpp"

#include <algorithm>
#include <map>

#include "nullq/errors.hpp"
#include "nullq/eval.hpp"

namespace nullq {

EqualityTheory EqualityTheory::of(const NrvCq& cq) {
  EqualityTheory g;
  g.vars = cq.parameters();
  g.equalities = cq.equalities;
  g.constants = cq.constants();
  return g;
}

std::vector<std::vector<Term>> EqualityTheory::classes() const {
  std::vector<Term> terms;
  for (const auto& v : vars) terms.push_back(Term::var(v));
  for (const auto& c : constants) terms.push_back(Term::constant(c));
  for (const auto& [l, r] : equalities)
    for (const Term* t : {&l, &r})
      if (std::find(terms.begin(), terms.end(), *t) == terms.end()) terms.push_back(*t);
  std::sort(terms.begin(), terms.end());
  std::vector<std::size_t> parent(terms.size());
  for (std::size_t i = 0; i < parent.size(); ++i) parent[i] = i;
  auto index = [&](const Term& t) {
    return static_cast<std::size_t>(std::lower_bound(terms.begin(), terms.end(), t) - terms.begin());
  };
  std::function<std::size_t(std::size_t)> find = [&](std::size_t i) {
    return parent[i] == i ? i : parent[i] = find(parent[i]);
  };
  for (const auto& [l, r] : equalities) {
    std::size_t a = find(index(l));
    std::size_t b = find(index(r));
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
  std::map<std::size_t, std::vector<Term>> groups;
  for (std::size_t i = 0; i < terms.size(); ++i) groups[find(i)].push_back(terms[i]);
  std::vector<std::vector<Term>> out;
  for (auto& [_, g] : groups) out.push_back(std::move(g));
  return out;
}

namespace {

std::vector<Term> with_pair(std::vector<Term> params, const Term& z, const Term& z2) {
  params.push_back(z);
  params.push_back(z2);
  return params;
}

// Map a γ term to the actual parameter it stands for.
Term instantiate(const EqualityTheory& g, const std::vector<Term>& params, const Term& t) {
  if (t.is_const()) return t;
  auto it = std::find(g.vars.begin(), g.vars.end(), t.name);
  if (it == g.vars.end()) throw Error("variable " + t.name + " is not a parameter of the theory");
  return params.at(static_cast<std::size_t>(it - g.vars.begin()));
}

}  // namespace

Formula DatalogEquiv::apply(const std::vector<Term>& params, const Term& z, const Term& z2) const {
  return Formula::atom(relation_, with_pair(params, z, z2));
}

Formula FoEquiv::apply(const std::vector<Term>& params, const Term& z, const Term& z2) const {
  return build_equiv_fo(gamma_, params, z, z2);
}

std::vector<Rule> build_equiv_program(const EqualityTheory& gamma, const EgdSet& sigma,
                                      const std::string& relation, const std::string& dom) {
  NameSupply names(std::set<std::string>(gamma.vars.begin(), gamma.vars.end()));
  std::vector<Term> ys;
  std::vector<BodyLiteral> dom_ys;
  for (const auto& v : gamma.vars) {
    ys.push_back(Term::var(v));
    dom_ys.push_back(BodyLiteral::atom(dom, {Term::var(v)}));
  }
  Term z = Term::var(names.fresh("z"));
  Term z1 = Term::var(names.fresh("z1"));
  Term z2 = Term::var(names.fresh("z2"));
  auto head = [&](const Term& a, const Term& b) { return with_pair(ys, a, b); };
  auto equiv_atom = [&](const Term& a, const Term& b) {
    return BodyLiteral::atom(relation, head(a, b));
  };

  std::vector<Rule> out;
  {
    auto body = dom_ys;
    body.push_back(BodyLiteral::atom(dom, {z}));
    out.push_back(Rule{relation, head(z, z), std::move(body)});
  }
  for (const auto& [a, b] : gamma.equalities) {
    std::vector<BodyLiteral> body{BodyLiteral::eq(z1, a), BodyLiteral::eq(z2, b)};
    body.insert(body.end(), dom_ys.begin(), dom_ys.end());
    out.push_back(Rule{relation, head(z1, z2), std::move(body)});
  }
  out.push_back(Rule{relation, head(z, z2), {equiv_atom(z, z1), equiv_atom(z1, z2)}});
  out.push_back(Rule{relation, head(z2, z), {equiv_atom(z, z2)}});
  for (const auto& e : sigma) {
    NameSupply local = names;
    std::map<std::string, Term> ren;
    for (const auto& v : e.variables()) ren.emplace(v, Term::var(local.fresh(v)));
    std::vector<BodyLiteral> body;
    for (const auto& a : e.body) {
      std::vector<Term> args;
      for (const auto& v : a.vars) args.push_back(ren.at(v));
      body.push_back(BodyLiteral::atom(a.relation, std::move(args)));
    }
    for (const auto& [l, r] : e.psi) body.push_back(equiv_atom(ren.at(l), ren.at(r)));
    body.insert(body.end(), dom_ys.begin(), dom_ys.end());
    out.push_back(Rule{relation, head(ren.at(e.head.first), ren.at(e.head.second)), std::move(body)});
  }
  return out;
}

Formula build_equiv_fo(const EqualityTheory& gamma, const std::vector<Term>& params,
                       const Term& z, const Term& z2) {
  if (params.size() != gamma.vars.size()) throw Error("equivFO parameter count mismatch");
  std::vector<std::vector<Term>> classes;
  for (auto& c : gamma.classes())
    if (c.size() > 1) classes.push_back(std::move(c));

  std::vector<Formula> disjuncts{Formula::eq(z, z2)};
  std::vector<bool> used(classes.size(), false);
  // Chains z = u1, v1 = u2, ..., vk = z2 through distinct classes.
  std::vector<Formula> chain;
  std::function<void(const Term&)> extend = [&](const Term& from) {
    for (std::size_t c = 0; c < classes.size(); ++c) {
      if (used[c]) continue;
      used[c] = true;
      for (const auto& u : classes[c])
        for (const auto& v : classes[c]) {
          if (u == v) continue;
          Term iu = instantiate(gamma, params, u);
          Term iv = instantiate(gamma, params, v);
          chain.push_back(Formula::eq(from, iu));
          chain.push_back(Formula::eq(z2, iv));
          disjuncts.push_back(Formula::conj(chain));
          chain.pop_back();
          extend(iv);
          chain.pop_back();
        }
      used[c] = false;
    }
  };
  extend(z);
  return Formula::disj(std::move(disjuncts));
}

Formula build_comp(const EquivEncoding& equiv, const std::vector<Term>& params, NameSupply& names) {
  Term z = Term::var(names.next("z"));
  Term z2 = Term::var(names.next("z"));
  Formula body = Formula::conj({equiv.apply(params, z, z2), Formula::negate(Formula::is_null(z)),
                                Formula::negate(Formula::is_null(z2))});
  return Formula::forall({z.name, z2.name}, Formula::implies(body, Formula::eq(z, z2)));
}

Formula build_imply(const EquivEncoding& gamma, const std::vector<Term>& params,
                    const EquivEncoding& gamma2, const std::vector<Term>& params2,
                    NameSupply& names) {
  Term z = Term::var(names.next("z"));
  Term z2 = Term::var(names.next("z"));
  return Formula::forall({z.name, z2.name}, Formula::implies(gamma2.apply(params2, z, z2),
                                                             gamma.apply(params, z, z2)));
}

namespace {

std::vector<Term> var_terms(const std::vector<std::string>& vs) {
  std::vector<Term> out;
  for (const auto& v : vs) out.push_back(Term::var(v));
  return out;
}

}  // namespace

PossFormulas build_poss(const DnfDisjunct& disjunct, const EquivFactory& encode, NameSupply& names) {
  const NrvCq& pos = disjunct.positive;
  auto pos_enc = encode(pos);
  std::vector<Term> params = var_terms(pos.parameters());
  std::vector<Formula> cons;
  for (const auto& neg : disjunct.negated) {
    auto neg_enc = encode(neg);
    std::vector<Term> params2 = var_terms(neg.parameters());
    Formula guard = Formula::conj({neg.relational_subquery(), build_comp(*neg_enc, params2, names)});
    Formula refuted = Formula::negate(build_imply(*pos_enc, params, *neg_enc, params2, names));
    cons.push_back(Formula::forall(neg.rel_vars, Formula::implies(guard, refuted)));
  }
  PossFormulas out;
  out.cons = Formula::conj(cons);
  out.poss = Formula::conj(
      {pos.relational_subquery(), build_comp(*pos_enc, params, names), out.cons});
  return out;
}

const char* to_string(RewriteTarget t) { return t == RewriteTarget::Datalog ? "datalog" : "fo"; }

std::string RewritingBundle::to_text() const {
  if (target == RewriteTarget::Datalog) return emit_text(program);
  return rho.to_string() + "\n";
}

namespace {

void reserve_cq(NameSupply& names, const NrvCq& cq) {
  for (const auto& v : cq.parameters()) names.reserve(v);
}

}  // namespace

RewritingBundle rewrite_certain(const Query& q, const EgdSet& sigma, RewriteTarget target,
                                const RewriteOptions& options) {
  if (classify(q.formula) > QueryClass::BCCQ)
    throw ClassificationError("certain-answer rewriting needs a BCCQ, got " +
                              std::string(to_string(classify(q.formula))));
  if (target == RewriteTarget::Fo && !sigma.empty())
    throw UnsupportedError("the fo target supports no constraints; use the datalog target");

  RewritingBundle b;
  b.target = target;
  b.answer_vars = q.answer_vars;
  b.negated = to_dnf_bccq(q, true);

  NameSupply names(q.formula.all_variables());
  for (const auto& d : b.negated.disjuncts) {
    reserve_cq(names, d.positive);
    for (const auto& n : d.negated) reserve_cq(names, n);
  }

  Schema schema = options.schema;
  for (const auto& [r, a] : q.formula.relations()) schema.emplace(r, a);
  for (const auto& [r, a] : relations(sigma)) schema.emplace(r, a);
  NameSupply rel_names;
  for (const auto& [r, _] : schema) rel_names.reserve(r);
  std::string dom = rel_names.fresh("Dom");

  std::vector<Rule> equiv_rules;
  std::vector<std::string> current;
  EquivFactory encode = [&](const NrvCq& cq) -> std::shared_ptr<const EquivEncoding> {
    EqualityTheory g = EqualityTheory::of(cq);
    if (target == RewriteTarget::Fo) return std::make_shared<FoEquiv>(std::move(g));
    std::string rel = rel_names.next("equiv");
    current.push_back(rel);
    auto rules = build_equiv_program(g, sigma, rel, dom);
    equiv_rules.insert(equiv_rules.end(), rules.begin(), rules.end());
    return std::make_shared<DatalogEquiv>(std::move(g), rel);
  };

  std::vector<Formula> conjuncts;
  for (const auto& d : b.negated.disjuncts) {
    current.clear();
    PossFormulas p = build_poss(d, encode, names);
    DisjunctArtifacts art;
    art.rel_vars = d.positive.rel_vars;
    art.poss = p.poss;
    art.cons = p.cons;
    art.equiv_relations = current;
    conjuncts.push_back(Formula::forall(art.rel_vars, Formula::negate(art.poss)));
    b.disjuncts.push_back(std::move(art));
  }
  b.rho = Formula::conj(std::move(conjuncts));

  if (target == RewriteTarget::Datalog) {
    std::set<Value> consts = q.formula.constants();
    for (const auto& d : b.negated.disjuncts) {
      auto c = d.positive.constants();
      consts.insert(c.begin(), c.end());
    }
    b.program.rules = domain_rules(dom, schema, consts);
    b.program.rules.insert(b.program.rules.end(), equiv_rules.begin(), equiv_rules.end());
    b.program.fo_layer = b.rho;
    b.program.answer_vars = q.answer_vars;
  }
  return b;
}

TupleSet evaluate_bundle(const RewritingBundle& bundle, const Database& d, ProgramOptions options) {
  if (bundle.target == RewriteTarget::Datalog) return eval_program(bundle.program, d, options);
  check_schema(bundle.rho.relations(), d);
  Evaluator ev(d);
  return ev.answers(bundle.rho, bundle.answer_vars);
}

}  // namespace nullq
