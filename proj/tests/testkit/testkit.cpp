#include "testkit.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "nullq/datalog.hpp"
#include "nullq/errors.hpp"
#include "nullq/eval.hpp"
#include "nullq/oracle.hpp"
#include "nullq/parser.hpp"

namespace testkit {

Database db(std::string_view text) { return parse_database(text); }
Query q(std::string_view text) { return parse_query(text); }

Tuple tup(std::string_view text) {
  return std::get<Tuple>(parse_payload(DecisionVariant::Member, text));
}

TupleSet tuples(std::string_view text) {
  return std::get<TupleSet>(parse_payload(DecisionVariant::Equal, text));
}

Value null(const std::string& name) { return Value::null(name); }
Value num(std::int64_t v) { return Value::integer(v); }

std::vector<Database> corpus(std::size_t n, std::uint64_t first_seed,
                             const fixtures::RandomParams& params) {
  std::vector<Database> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back(fixtures::gen_random(first_seed + i, params).database);
  return out;
}

namespace {

std::vector<Value> domain_of(const Database& d, const Formula& f) {
  std::set<Value> dom = d.active_domain();
  auto c = f.constants();
  dom.insert(c.begin(), c.end());
  return {dom.begin(), dom.end()};
}

void product(const std::vector<Value>& dom, std::size_t k,
             const std::function<void(const Tuple&)>& out) {
  Tuple t(k);
  std::function<void(std::size_t)> rec = [&](std::size_t i) {
    if (i == k) {
      out(t);
      return;
    }
    for (const auto& v : dom) {
      t[i] = v;
      rec(i + 1);
    }
  };
  rec(0);
}

Value term_value(const Term& t, const std::map<std::string, Value>& env) {
  if (t.is_const()) return t.value;
  return env.at(t.name);
}

bool quantify(const Formula& f, const Database& d, const std::vector<Value>& domain,
              std::map<std::string, Value>& env, std::size_t i, bool universal) {
  const auto& vars = f.bound_vars();
  if (i == vars.size()) return ref_holds(f.child(), d, domain, env);
  auto saved = env.find(vars[i]) == env.end() ? std::optional<Value>{} : std::optional<Value>{env[vars[i]]};
  bool result = universal;
  for (const auto& v : domain) {
    env[vars[i]] = v;
    bool r = quantify(f, d, domain, env, i + 1, universal);
    if (universal && !r) {
      result = false;
      break;
    }
    if (!universal && r) {
      result = true;
      break;
    }
  }
  if (saved) {
    env[vars[i]] = *saved;
  } else {
    env.erase(vars[i]);
  }
  return result;
}

}  // namespace

bool ref_holds(const Formula& f, const Database& d, const std::vector<Value>& domain,
               std::map<std::string, Value>& env) {
  switch (f.kind()) {
    case NodeKind::True:
      return true;
    case NodeKind::False:
      return false;
    case NodeKind::Atom: {
      Tuple t;
      for (const auto& term : f.terms()) t.push_back(term_value(term, env));
      return d.relation(f.relation()).contains(t);
    }
    case NodeKind::Eq:
      return term_value(f.terms()[0], env) == term_value(f.terms()[1], env);
    case NodeKind::IsNull:
      return term_value(f.terms()[0], env).is_null();
    case NodeKind::Not:
      return !ref_holds(f.child(), d, domain, env);
    case NodeKind::And:
      for (const auto& c : f.children())
        if (!ref_holds(c, d, domain, env)) return false;
      return true;
    case NodeKind::Or:
      for (const auto& c : f.children())
        if (ref_holds(c, d, domain, env)) return true;
      return false;
    case NodeKind::Exists:
      return quantify(f, d, domain, env, 0, false);
    case NodeKind::Forall:
      return quantify(f, d, domain, env, 0, true);
  }
  return false;
}

TupleSet ref_eval(const Query& query, const Database& d) {
  auto domain = domain_of(d, query.formula);
  TupleSet out;
  product(domain, query.answer_vars.size(), [&](const Tuple& t) {
    std::map<std::string, Value> env;
    for (std::size_t i = 0; i < t.size(); ++i) env[query.answer_vars[i]] = t[i];
    if (ref_holds(query.formula, d, domain, env)) out.insert(t);
  });
  return out;
}

bool ref_satisfies(const Database& d, const EgdSet& sigma) {
  std::set<Value> adom = d.active_domain();
  std::vector<Value> dom(adom.begin(), adom.end());
  for (const auto& e : sigma) {
    auto vars = e.variables();
    bool ok = true;
    product(dom, vars.size(), [&](const Tuple& t) {
      if (!ok) return;
      std::map<std::string, Value> env;
      for (std::size_t i = 0; i < vars.size(); ++i) env[vars[i]] = t[i];
      for (const auto& a : e.body) {
        Tuple row;
        for (const auto& v : a.vars) row.push_back(env[v]);
        if (!d.relation(a.relation).contains(row)) return;
      }
      for (const auto& [x, y] : e.psi)
        if (env[x] != env[y]) return;
      if (env[e.head.first] != env[e.head.second]) ok = false;
    });
    if (!ok) return false;
  }
  return true;
}

TupleSet RefSemantics::certain() const {
  TupleSet out;
  for (std::size_t i = 0; i < candidates.size(); ++i)
    if (std::all_of(supports[i].begin(), supports[i].end(), [](bool b) { return b; }))
      out.insert(candidates[i]);
  return out;
}

TupleSet RefSemantics::best() const {
  auto subset = [](const std::vector<bool>& a, const std::vector<bool>& b) {
    for (std::size_t i = 0; i < a.size(); ++i)
      if (a[i] && !b[i]) return false;
    return true;
  };
  TupleSet out;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    bool dominated = false;
    for (std::size_t j = 0; j < candidates.size() && !dominated; ++j)
      if (j != i && subset(supports[i], supports[j]) && supports[i] != supports[j]) dominated = true;
    if (!dominated) out.insert(candidates[i]);
  }
  return out;
}

RefSemantics ref_semantics(const Query& query, const Database& d, const EgdSet& sigma) {
  RefSemantics out;
  auto domain = domain_of(d, query.formula);
  product(domain, query.answer_vars.size(), [&](const Tuple& t) { out.candidates.push_back(t); });

  std::set<Value> known = d.constants();
  auto qc = query.formula.constants();
  known.insert(qc.begin(), qc.end());
  std::int64_t top = 0;
  for (const auto& v : known)
    if (v.is_int()) top = std::max(top, v.as_int());
  std::vector<Value> range(known.begin(), known.end());
  auto nulls = d.nulls();
  for (std::size_t i = 0; i < nulls.size(); ++i) range.push_back(Value::integer(top + 1 + static_cast<std::int64_t>(i)));

  std::vector<Value> null_list(nulls.begin(), nulls.end());
  product(range, null_list.size(), [&](const Tuple& image) {
    Valuation v;
    for (std::size_t i = 0; i < null_list.size(); ++i) v.assign(null_list[i].text(), image[i]);
    Database vd = apply_valuation(v, d);
    if (!sigma.empty() && !ref_satisfies(vd, sigma)) return;
    out.valuations.push_back(v);
  });

  out.supports.assign(out.candidates.size(), std::vector<bool>(out.valuations.size(), false));
  for (std::size_t j = 0; j < out.valuations.size(); ++j) {
    Database vd = apply_valuation(out.valuations[j], d);
    auto vdom = domain_of(vd, query.formula);
    for (std::size_t i = 0; i < out.candidates.size(); ++i) {
      Tuple a = out.valuations[j].apply(out.candidates[i]);
      std::map<std::string, Value> env;
      for (std::size_t k = 0; k < a.size(); ++k) env[query.answer_vars[k]] = a[k];
      out.supports[i][j] = ref_holds(query.formula, vd, vdom, env);
    }
  }
  return out;
}

TupleSet all_candidates(const Query& query, const Database& d) {
  TupleSet out;
  product(domain_of(d, query.formula), query.answer_vars.size(), [&](const Tuple& t) { out.insert(t); });
  return out;
}

std::vector<fixtures::Graph> all_graphs(std::size_t max_nodes) {
  std::vector<fixtures::Graph> out;
  for (std::size_t n = 1; n <= max_nodes; ++n) {
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) pairs.emplace_back(i, j);
    for (std::size_t mask = 0; mask < (std::size_t{1} << pairs.size()); ++mask) {
      fixtures::Graph g;
      for (std::size_t i = 0; i < n; ++i) g.nodes.push_back("v" + std::to_string(i + 1));
      for (std::size_t e = 0; e < pairs.size(); ++e)
        if (mask >> e & 1U) g.edges.emplace_back(g.nodes[pairs[e].first], g.nodes[pairs[e].second]);
      out.push_back(std::move(g));
    }
  }
  return out;
}

std::size_t chromatic_number(const fixtures::Graph& g) {
  const std::size_t n = g.nodes.size();
  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < n; ++i) index[g.nodes[i]] = i;
  for (std::size_t k = 1; k <= n; ++k) {
    std::vector<std::size_t> colour(n, 0);
    bool found = false;
    std::function<void(std::size_t)> rec = [&](std::size_t i) {
      if (found) return;
      if (i == n) {
        for (const auto& [a, b] : g.edges)
          if (colour[index[a]] == colour[index[b]]) return;
        found = true;
        return;
      }
      for (std::size_t c = 0; c < k; ++c) {
        colour[i] = c;
        rec(i + 1);
      }
    };
    rec(0);
    if (found) return k;
  }
  return n;
}

namespace {

EqualityTheory random_theory(fixtures::Rng& rng, const std::string& prefix) {
  EqualityTheory g;
  std::size_t n = 1 + rng.below(3);
  for (std::size_t i = 0; i < n; ++i) g.vars.push_back(prefix + std::to_string(i + 1));
  auto term = [&]() {
    if (rng.chance(0.25)) return Term::constant(Value::integer(static_cast<std::int64_t>(1 + rng.below(2))));
    return Term::var(g.vars[rng.below(n)]);
  };
  std::size_t eqs = rng.below(4);
  for (std::size_t i = 0; i < eqs; ++i) g.equalities.emplace_back(term(), term());
  return g;
}

bool theory_holds(const EqualityTheory& g, const Tuple& params, const Valuation& v) {
  std::map<std::string, Value> env;
  for (std::size_t i = 0; i < g.vars.size(); ++i) env[g.vars[i]] = v.apply(params[i]);
  for (const auto& [a, b] : g.equalities)
    if (term_value(a, env) != term_value(b, env)) return false;
  return true;
}

std::set<std::pair<Value, Value>> pairs_of(const TupleSet& s) {
  std::set<std::pair<Value, Value>> out;
  for (const auto& t : s) out.emplace(t[0], t[1]);
  return out;
}

}  // namespace

EquivDraw draw_equiv(std::uint64_t seed) {
  fixtures::Rng rng(seed * 7919 + 17);
  fixtures::RandomParams params;
  params.max_facts = 5;
  params.max_consts = 3;
  params.max_nulls = 3;
  EquivDraw draw;
  draw.d = fixtures::gen_random(seed, params).database;
  auto pools = fixtures::egd_pools();
  draw.sigma = pools[rng.below(pools.size())];
  draw.gamma = random_theory(rng, "y");
  draw.gamma2 = random_theory(rng, "u");
  std::set<Value> consts;
  for (const auto* g : {&draw.gamma, &draw.gamma2})
    for (const auto& [a, b] : g->equalities)
      for (const auto* t : {&a, &b})
        if (t->is_const()) consts.insert(t->value);
  draw.gamma.constants = consts;
  draw.gamma2.constants = consts;
  std::set<Value> dom = draw.d.active_domain();
  dom.insert(consts.begin(), consts.end());
  std::vector<Value> dl(dom.begin(), dom.end());
  for (std::size_t i = 0; i < draw.gamma.vars.size(); ++i) draw.params.push_back(dl[rng.below(dl.size())]);
  for (std::size_t i = 0; i < draw.gamma2.vars.size(); ++i) draw.params2.push_back(dl[rng.below(dl.size())]);
  return draw;
}

std::string check_equiv_laws(const EquivDraw& draw) {
  const auto& d0 = draw.d;
  std::set<Value> consts = draw.gamma.constants;
  Schema schema = d0.schema();
  for (const auto& [r, a] : relations(draw.sigma)) schema.emplace(r, a);

  // The parameter tuples may hold nulls, which terms cannot, so they are
  // passed in through unary relations outside Dom.
  Database d = d0;
  for (const auto& [r, a] : schema) d.declare(r, a);
  auto bind = [&](const std::string& prefix, const Tuple& t, std::vector<Term>& vars,
                  std::vector<Formula>& atoms) {
    for (std::size_t i = 0; i < t.size(); ++i) {
      std::string rel = prefix + std::to_string(i + 1);
      std::string var = "p" + prefix + std::to_string(i + 1);
      d.declare(rel, 1);
      d.insert(rel, {t[i]});
      vars.push_back(Term::var(var));
      atoms.push_back(Formula::atom(rel, {Term::var(var)}));
    }
  };
  std::vector<Term> pv, pv2;
  std::vector<Formula> pa, pa2;
  bind("Pa", draw.params, pv, pa);
  bind("Pb", draw.params2, pv2, pa2);
  auto names_of = [](const std::vector<Term>& ts) {
    std::vector<std::string> out;
    for (const auto& t : ts) out.push_back(t.name);
    return out;
  };

  DatalogProgram base;
  base.rules = domain_rules("Dom", schema, consts);
  for (const auto& r : build_equiv_program(draw.gamma, draw.sigma, "eqa", "Dom")) base.rules.push_back(r);
  for (const auto& r : build_equiv_program(draw.gamma2, draw.sigma, "eqb", "Dom")) base.rules.push_back(r);
  DatalogEquiv ea(draw.gamma, "eqa");
  DatalogEquiv eb(draw.gamma2, "eqb");
  auto z = Term::var("z"), z2 = Term::var("zz");

  auto run = [&](Formula body, std::vector<std::string> answer) {
    DatalogProgram p = base;
    std::vector<Formula> parts = pa;
    parts.insert(parts.end(), pa2.begin(), pa2.end());
    parts.push_back(std::move(body));
    auto bound = names_of(pv);
    auto b2 = names_of(pv2);
    bound.insert(bound.end(), b2.begin(), b2.end());
    p.fo_layer = Formula::exists(bound, Formula::conj(parts));
    p.answer_vars = std::move(answer);
    return eval_program(p, d);
  };

  auto rel_a = pairs_of(run(ea.apply(pv, z, z2), {"z", "zz"}));
  auto rel_b = pairs_of(run(eb.apply(pv2, z, z2), {"z", "zz"}));

  std::set<Value> dom = d0.active_domain();
  dom.insert(consts.begin(), consts.end());
  for (const auto* rel : {&rel_a, &rel_b}) {
    for (const auto& s : dom)
      if (!rel->contains({s, s})) return "equiv not reflexive on " + s.to_string();
    for (const auto& [s, t] : *rel) {
      if (!rel->contains({t, s})) return "equiv not symmetric";
      for (const auto& [u, w] : *rel)
        if (u == t && !rel->contains({s, w})) return "equiv not transitive";
    }
  }

  if (draw.sigma.empty()) {
    Evaluator ev(d, consts);
    std::vector<Formula> parts = pa;
    parts.push_back(build_equiv_fo(draw.gamma, pv, z, z2));
    auto fo = pairs_of(ev.answers(Formula::exists(names_of(pv), Formula::conj(parts)), {"z", "zz"}));
    if (fo != rel_a) return "equivFO differs from the Datalog equiv relation";
  }

  NameSupply names({"z", "zz"});
  bool comp_a = !run(build_comp(ea, pv, names), {}).empty();
  bool imply = !run(build_imply(ea, pv, eb, pv2, names), {}).empty();

  std::vector<Formula> pad;
  for (const auto& c : consts) pad.push_back(Formula::eq(Term::constant(c), Term::constant(c)));
  auto space = enumerate_patterns(d0, Formula::conj(pad), draw.sigma);

  bool some_a = false;
  bool included = true;
  for (const auto& p : space.patterns) {
    if (!p.consistent) continue;
    bool ha = theory_holds(draw.gamma, draw.params, p.valuation);
    bool hb = theory_holds(draw.gamma2, draw.params2, p.valuation);
    for (const auto& [rel, h] : {std::pair{&rel_a, ha}, std::pair{&rel_b, hb}}) {
      bool merges = std::all_of(rel->begin(), rel->end(), [&](const auto& st) {
        return p.valuation.apply(st.first) == p.valuation.apply(st.second);
      });
      if (merges != h) return "equiv characterization fails for a consistent pattern";
    }
    some_a = some_a || ha;
    if (ha && !hb) included = false;
  }
  if (comp_a != some_a) return "comp disagrees with the pattern enumeration";
  if ((imply || !comp_a) != included) return "imply disagrees with support inclusion";
  return {};
}

std::set<std::pair<Value, Value>> equiv_pairs(const Database& d0, const EqualityTheory& gamma,
                                              const EgdSet& sigma, const Tuple& params,
                                              FixpointStrategy strategy) {
  Schema schema = d0.schema();
  for (const auto& [r, a] : relations(sigma)) schema.emplace(r, a);
  Database d = d0;
  for (const auto& [r, a] : schema) d.declare(r, a);
  std::vector<Term> vars;
  std::vector<Formula> parts;
  std::vector<std::string> bound;
  for (std::size_t i = 0; i < params.size(); ++i) {
    std::string rel = "Param" + std::to_string(i + 1);
    d.declare(rel, 1);
    d.insert(rel, {params[i]});
    bound.push_back("p" + std::to_string(i + 1));
    vars.push_back(Term::var(bound.back()));
    parts.push_back(Formula::atom(rel, {vars.back()}));
  }
  DatalogProgram p;
  p.rules = domain_rules("Dom", schema, gamma.constants);
  for (const auto& r : build_equiv_program(gamma, sigma, "eq", "Dom")) p.rules.push_back(r);
  parts.push_back(DatalogEquiv(gamma, "eq").apply(vars, Term::var("z"), Term::var("zz")));
  p.fo_layer = Formula::exists(bound, Formula::conj(parts));
  p.answer_vars = {"z", "zz"};
  return pairs_of(eval_program(p, d, {strategy}));
}

std::string describe(const TupleSet& s) {
  std::ostringstream out;
  out << "{";
  bool first = true;
  for (const auto& t : s) {
    out << (first ? "" : ", ") << "(" << to_string(t) << ")";
    first = false;
  }
  out << "}";
  return out.str();
}

}  // namespace testkit
