#include "nullq/normal_form.hpp"

#include <algorithm>
#include <map>

#include "nullq/errors.hpp"

namespace nullq {

std::set<Value> NrvCq::constants() const {
  std::set<Value> out;
  for (const auto& [l, r] : equalities) {
    if (l.is_const()) out.insert(l.value);
    if (r.is_const()) out.insert(r.value);
  }
  return out;
}

std::vector<std::string> NrvCq::parameters() const {
  std::vector<std::string> out = free_vars;
  out.insert(out.end(), rel_vars.begin(), rel_vars.end());
  return out;
}

Formula NrvCq::relational_subquery() const {
  std::vector<Formula> fs;
  for (const auto& a : atoms) {
    std::vector<Term> args;
    for (const auto& v : a.vars) args.push_back(Term::var(v));
    fs.push_back(Formula::atom(a.relation, std::move(args)));
  }
  return Formula::conj(std::move(fs));
}

Formula NrvCq::equality_subquery() const {
  std::vector<Formula> fs;
  for (const auto& [l, r] : equalities) fs.push_back(Formula::eq(l, r));
  return Formula::conj(std::move(fs));
}

Formula NrvCq::to_formula() const {
  std::vector<Formula> fs;
  if (!atoms.empty()) fs.push_back(relational_subquery());
  if (!equalities.empty()) fs.push_back(equality_subquery());
  return Formula::exists(rel_vars, Formula::conj(std::move(fs)));
}

std::string NrvCq::check_invariants() const {
  std::set<std::string> xs(free_vars.begin(), free_vars.end());
  std::set<std::string> ws(rel_vars.begin(), rel_vars.end());
  if (xs.size() != free_vars.size()) return "repeated free variable";
  if (ws.size() != rel_vars.size()) return "repeated relational variable";
  for (const auto& w : ws)
    if (xs.contains(w)) return "variable " + w + " is both free and relational";
  std::set<std::string> used;
  for (const auto& a : atoms)
    for (const auto& v : a.vars) {
      if (!ws.contains(v)) return "atom variable " + v + " is not relational";
      if (!used.insert(v).second) return "variable " + v + " repeats across atoms";
    }
  if (used != ws) return "relational variable outside every atom";
  std::set<std::string> seen;
  for (const auto& [l, r] : equalities)
    for (const Term* t : {&l, &r}) {
      if (!t->is_var()) continue;
      if (!xs.contains(t->name) && !ws.contains(t->name))
        return "equality mentions unknown variable " + t->name;
      seen.insert(t->name);
    }
  for (const auto& x : free_vars)
    if (!seen.contains(x)) return "free variable " + x + " occurs in no equality";
  return {};
}

NrvCq NrvCq::rename_apart(NameSupply& names, const std::string& base) const {
  std::map<std::string, std::string> ren;
  NrvCq out;
  out.free_vars = free_vars;
  for (const auto& w : rel_vars) {
    ren[w] = names.next(base);
    out.rel_vars.push_back(ren[w]);
  }
  auto r = [&](const Term& t) {
    if (t.is_var()) {
      auto it = ren.find(t.name);
      if (it != ren.end()) return Term::var(it->second);
    }
    return t;
  };
  for (const auto& a : atoms) {
    Atom na{a.relation, {}};
    for (const auto& v : a.vars) na.vars.push_back(ren.at(v));
    out.atoms.push_back(std::move(na));
  }
  for (const auto& [l, rr] : equalities) out.equalities.emplace_back(r(l), r(rr));
  return out;
}

void NrvCq::pad_constants(const std::set<Value>& target) {
  auto have = constants();
  for (const auto& c : target)
    if (!have.contains(c)) equalities.emplace_back(Term::constant(c), Term::constant(c));
}

namespace {

struct FlatCq {
  struct Atom {
    std::string relation;
    std::vector<Term> args;  // bound variables carry unique ids
  };
  std::vector<Atom> atoms;
  std::vector<std::pair<Term, Term>> eqs;
  std::set<std::string> bound;
};

void flatten(const Formula& f, std::map<std::string, std::string>& scope, std::size_t& counter,
             FlatCq& out) {
  auto t = [&](const Term& term) {
    if (term.is_var()) {
      auto it = scope.find(term.name);
      if (it != scope.end()) return Term::var(it->second);
    }
    return term;
  };
  switch (f.kind()) {
    case NodeKind::True: break;
    case NodeKind::Atom: {
      FlatCq::Atom a{f.relation(), {}};
      for (const auto& term : f.terms()) a.args.push_back(t(term));
      out.atoms.push_back(std::move(a));
      break;
    }
    case NodeKind::Eq: out.eqs.emplace_back(t(f.terms()[0]), t(f.terms()[1])); break;
    case NodeKind::And:
      for (const auto& c : f.children()) flatten(c, scope, counter, out);
      break;
    case NodeKind::Exists: {
      std::map<std::string, std::string> saved = scope;
      for (const auto& v : f.bound_vars()) {
        std::string id = "#" + std::to_string(counter++) + ":" + v;
        scope[v] = id;
        out.bound.insert(id);
      }
      flatten(f.child(), scope, counter, out);
      scope = std::move(saved);
      break;
    }
    default: throw ClassificationError("not a conjunctive query: " + f.to_string());
  }
}

}  // namespace

NrvCq to_nrv(const Formula& cq, const std::vector<std::string>& answer_vars) {
  if (classify(cq) != QueryClass::CQ)
    throw ClassificationError("not a conjunctive query: " + cq.to_string());
  auto free = cq.free_variables();
  for (const auto& v : free)
    if (std::find(answer_vars.begin(), answer_vars.end(), v) == answer_vars.end())
      throw Error("free variable " + v + " is not an answer variable");

  FlatCq flat;
  std::map<std::string, std::string> scope;
  std::size_t counter = 0;
  flatten(cq, scope, counter, flat);

  NameSupply names(cq.all_variables());
  names.reserve(std::set<std::string>(answer_vars.begin(), answer_vars.end()));
  NrvCq out;
  out.free_vars = answer_vars;
  std::map<std::string, std::string> first;  // bound id -> first w
  std::set<std::string> free_in_atom;
  for (const auto& a : flat.atoms) {
    NrvCq::Atom na{a.relation, {}};
    for (const auto& term : a.args) {
      std::string w = names.next("w");
      na.vars.push_back(w);
      out.rel_vars.push_back(w);
      if (term.is_const()) {
        out.equalities.emplace_back(Term::var(w), term);
      } else if (flat.bound.contains(term.name)) {
        auto [it, fresh] = first.emplace(term.name, w);
        if (!fresh) out.equalities.emplace_back(Term::var(it->second), Term::var(w));
      } else {
        out.equalities.emplace_back(Term::var(w), term);
        free_in_atom.insert(term.name);
      }
    }
    out.atoms.push_back(std::move(na));
  }
  auto map_term = [&](const Term& term) {
    if (term.is_var() && flat.bound.contains(term.name)) {
      auto it = first.find(term.name);
      if (it == first.end()) {
        std::string shown = term.name.substr(term.name.find(':') + 1);
        throw UnsupportedError("variable " + shown + " occurs in no relational atom of " +
                               cq.to_string());
      }
      return Term::var(it->second);
    }
    return term;
  };
  for (const auto& [l, r] : flat.eqs) out.equalities.emplace_back(map_term(l), map_term(r));
  for (const auto& v : free)
    if (!free_in_atom.contains(v))
      throw UnsupportedError("free variable " + v + " occurs in no relational atom of " +
                             cq.to_string());
  for (const auto& x : answer_vars)
    if (std::find(free.begin(), free.end(), x) == free.end())
      out.equalities.emplace_back(Term::var(x), Term::var(x));
  return out;
}

NrvCq to_nrv(const Query& cq) { return to_nrv(cq.formula, cq.answer_vars); }

NrvCq trivial_cq(const std::vector<std::string>& answer_vars) {
  NrvCq out;
  out.free_vars = answer_vars;
  for (const auto& x : answer_vars) out.equalities.emplace_back(Term::var(x), Term::var(x));
  return out;
}

Formula DnfBccq::to_formula() const {
  std::vector<Formula> ds;
  for (const auto& d : disjuncts) {
    std::vector<Formula> parts{d.positive.to_formula()};
    for (const auto& n : d.negated) parts.push_back(Formula::negate(n.to_formula()));
    ds.push_back(Formula::conj(std::move(parts)));
  }
  return Formula::disj(std::move(ds));
}

namespace {

std::vector<Formula> pe_to_cqs(const Formula& f) {
  switch (f.kind()) {
    case NodeKind::True:
    case NodeKind::Atom:
    case NodeKind::Eq: return {f};
    case NodeKind::False: return {};
    case NodeKind::Or: {
      std::vector<Formula> out;
      for (const auto& c : f.children()) {
        auto sub = pe_to_cqs(c);
        out.insert(out.end(), sub.begin(), sub.end());
      }
      return out;
    }
    case NodeKind::And: {
      std::vector<std::vector<Formula>> acc{{}};
      for (const auto& c : f.children()) {
        auto sub = pe_to_cqs(c);
        std::vector<std::vector<Formula>> next;
        for (const auto& prefix : acc)
          for (const auto& s : sub) {
            auto p = prefix;
            p.push_back(s);
            next.push_back(std::move(p));
          }
        acc = std::move(next);
      }
      std::vector<Formula> out;
      for (auto& parts : acc) out.push_back(Formula::conj(std::move(parts)));
      return out;
    }
    case NodeKind::Exists: {
      std::vector<Formula> out;
      for (const auto& c : pe_to_cqs(f.child())) out.push_back(Formula::exists(f.bound_vars(), c));
      return out;
    }
    default: throw ClassificationError("not positive existential: " + f.to_string());
  }
}

struct Literal {
  std::vector<Formula> positive;  // CQ formulas, conjoined
  std::vector<Formula> negated;   // CQ formulas
};

std::vector<Literal> product(const std::vector<std::vector<Literal>>& parts) {
  std::vector<Literal> acc{Literal{}};
  for (const auto& part : parts) {
    std::vector<Literal> next;
    for (const auto& a : acc)
      for (const auto& b : part) {
        Literal l = a;
        l.positive.insert(l.positive.end(), b.positive.begin(), b.positive.end());
        l.negated.insert(l.negated.end(), b.negated.begin(), b.negated.end());
        next.push_back(std::move(l));
      }
    acc = std::move(next);
  }
  return acc;
}

std::vector<Literal> dnf(const Formula& f, bool neg) {
  if (classify(f) <= QueryClass::UCQ) {
    auto cqs = pe_to_cqs(f);
    if (!neg) {
      std::vector<Literal> out;
      for (const auto& c : cqs) out.push_back(Literal{{c}, {}});
      return out;
    }
    return {Literal{{}, cqs}};
  }
  switch (f.kind()) {
    case NodeKind::Not: return dnf(f.child(), !neg);
    case NodeKind::And:
    case NodeKind::Or: {
      bool is_product = (f.kind() == NodeKind::And) != neg;
      std::vector<std::vector<Literal>> parts;
      for (const auto& c : f.children()) parts.push_back(dnf(c, neg));
      if (is_product) return product(parts);
      std::vector<Literal> out;
      for (auto& p : parts) out.insert(out.end(), p.begin(), p.end());
      return out;
    }
    default: throw ClassificationError("not a Boolean combination of UCQs: " + f.to_string());
  }
}

}  // namespace

DnfBccq to_dnf_bccq(const Query& q, bool negate) {
  if (classify(q.formula) > QueryClass::BCCQ)
    throw ClassificationError("not a BCCQ: " + q.formula.to_string());
  DnfBccq out;
  out.answer_vars = q.answer_vars;
  NameSupply names(q.formula.all_variables());
  names.reserve(std::set<std::string>(q.answer_vars.begin(), q.answer_vars.end()));
  for (const auto& lit : dnf(q.formula, negate)) {
    DnfDisjunct d;
    d.positive = lit.positive.empty() ? trivial_cq(q.answer_vars)
                                      : to_nrv(Formula::conj(lit.positive), q.answer_vars);
    d.positive = d.positive.rename_apart(names);
    for (const auto& n : lit.negated)
      d.negated.push_back(to_nrv(n, q.answer_vars).rename_apart(names));
    std::set<Value> consts = d.positive.constants();
    for (const auto& n : d.negated) {
      auto c = n.constants();
      consts.insert(c.begin(), c.end());
    }
    d.positive.pad_constants(consts);
    for (auto& n : d.negated) n.pad_constants(consts);
    out.disjuncts.push_back(std::move(d));
  }
  return out;
}

std::vector<NrvCq> to_nrv_ucq(const Query& q) {
  if (classify(q.formula) > QueryClass::UCQ)
    throw ClassificationError("not a union of conjunctive queries: " + q.formula.to_string());
  NameSupply names(q.formula.all_variables());
  names.reserve(std::set<std::string>(q.answer_vars.begin(), q.answer_vars.end()));
  std::vector<NrvCq> out;
  std::set<Value> consts;
  for (const auto& c : pe_to_cqs(q.formula)) {
    out.push_back(to_nrv(c, q.answer_vars).rename_apart(names));
    auto cs = out.back().constants();
    consts.insert(cs.begin(), cs.end());
  }
  for (auto& c : out) c.pad_constants(consts);
  return out;
}

}  // namespace nullq
