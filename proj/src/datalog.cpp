#include "nullq/datalog.hpp"

#include <algorithm>
#include <unordered_map>
#include <unordered_set>

#include "lexer.hpp"
#include "nullq/errors.hpp"
#include "nullq/eval.hpp"
#include "nullq/parser.hpp"

namespace nullq {

namespace {

std::string join_terms(const std::vector<Term>& ts) {
  std::string out;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    if (i) out += ", ";
    out += ts[i].to_string();
  }
  return out;
}

}  // namespace

std::string BodyLiteral::to_string() const {
  if (kind == Kind::Eq) return terms[0].to_string() + " = " + terms[1].to_string();
  return relation + "(" + join_terms(terms) + ")";
}

std::string Rule::to_string() const {
  std::string out = head + "(" + join_terms(head_terms) + ")";
  for (std::size_t i = 0; i < body.size(); ++i) {
    out += i ? ", " : " :- ";
    out += body[i].to_string();
  }
  return out + ".";
}

Schema DatalogProgram::idb_schema() const {
  Schema out;
  for (const auto& r : rules) {
    auto [it, fresh] = out.emplace(r.head, r.head_terms.size());
    if (!fresh && it->second != r.head_terms.size())
      throw ValidationError("idb relation " + r.head + " defined with two arities");
  }
  return out;
}

std::set<Value> DatalogProgram::constants() const {
  std::set<Value> out = fo_layer.constants();
  for (const auto& r : rules) {
    for (const auto& t : r.head_terms)
      if (t.is_const()) out.insert(t.value);
    for (const auto& l : r.body)
      for (const auto& t : l.terms)
        if (t.is_const()) out.insert(t.value);
  }
  return out;
}

std::vector<Rule> domain_rules(const std::string& dom, const Schema& schema,
                               const std::set<Value>& constants) {
  std::vector<Rule> out;
  for (const auto& [rel, arity] : schema) {
    std::vector<Term> args;
    for (std::size_t i = 0; i < arity; ++i) args.push_back(Term::var("v" + std::to_string(i + 1)));
    for (std::size_t i = 0; i < arity; ++i)
      out.push_back(Rule{dom, {args[i]}, {BodyLiteral::atom(rel, args)}});
  }
  for (const auto& c : constants) out.push_back(Rule{dom, {Term::constant(c)}, {}});
  return out;
}

void validate_program(const DatalogProgram& p, const Database& d) {
  Schema idb = p.idb_schema();
  for (const auto& [rel, _] : idb)
    if (d.has_relation(rel))
      throw ValidationError("idb relation " + rel + " is also a database relation");
  Schema all = idb;
  auto use = [&](const std::string& rel, std::size_t arity) {
    auto [it, fresh] = all.emplace(rel, arity);
    if (!fresh && it->second != arity)
      throw ValidationError("relation " + rel + " used with arities " + std::to_string(it->second) +
                            " and " + std::to_string(arity));
    auto ar = d.arity(rel);
    if (ar && *ar != arity)
      throw ValidationError("relation " + rel + " used with the wrong arity");
  };
  for (const auto& r : p.rules) {
    std::set<std::string> restricted;
    for (const auto& l : r.body) {
      if (l.kind != BodyLiteral::Kind::Atom) continue;
      use(l.relation, l.terms.size());
      for (const auto& t : l.terms)
        if (t.is_var()) restricted.insert(t.name);
    }
    for (bool changed = true; changed;) {
      changed = false;
      for (const auto& l : r.body) {
        if (l.kind != BodyLiteral::Kind::Eq) continue;
        const Term& a = l.terms[0];
        const Term& b = l.terms[1];
        auto ok = [&](const Term& t) { return t.is_const() || restricted.contains(t.name); };
        if (ok(a) && b.is_var() && restricted.insert(b.name).second) changed = true;
        if (ok(b) && a.is_var() && restricted.insert(a.name).second) changed = true;
      }
    }
    auto check = [&](const Term& t) {
      if (t.is_var() && !restricted.contains(t.name))
        throw ValidationError("unsafe rule, variable " + t.name + " is not range-restricted: " +
                              r.to_string());
    };
    for (const auto& t : r.head_terms) check(t);
    for (const auto& l : r.body)
      for (const auto& t : l.terms) check(t);
  }
  for (const auto& [rel, arity] : p.fo_layer.relations()) use(rel, arity);
  for (const auto& v : p.fo_layer.free_variables())
    if (std::find(p.answer_vars.begin(), p.answer_vars.end(), v) == p.answer_vars.end())
      throw ValidationError("FO layer variable " + v + " is not an answer variable");
}

namespace {

std::uint64_t mix(std::uint64_t h, std::uint64_t v) {
  return h ^ (v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2));
}

struct VecHash {
  std::size_t operator()(const std::vector<int>& v) const noexcept {
    std::uint64_t h = v.size();
    for (int x : v) h = mix(h, static_cast<std::uint64_t>(x));
    return h;
  }
};

// Relations of one fixpoint computation, over dense value ids.
struct Store {
  struct Index {
    std::size_t covered = 0;
    std::unordered_map<std::uint64_t, std::vector<std::uint32_t>> buckets;
  };
  struct Rel {
    std::size_t arity = 0;
    std::vector<std::vector<int>> rows;
    std::unordered_set<std::vector<int>, VecHash> set;
    std::unordered_map<std::uint64_t, Index> indices;
  };

  Domain domain;
  std::map<std::string, Rel> rels;

  Rel& rel(const std::string& name, std::size_t arity) {
    auto& r = rels[name];
    r.arity = arity;
    return r;
  }

  static bool add(Rel& r, std::vector<int> row) {
    if (!r.set.insert(row).second) return false;
    r.rows.push_back(std::move(row));
    return true;
  }

  static const std::vector<std::uint32_t>* lookup(Rel& r, std::uint64_t mask, std::uint64_t key,
                                                  std::size_t limit) {
    auto& idx = r.indices[mask];
    for (; idx.covered < limit; ++idx.covered) {
      std::uint64_t h = 0;
      const auto& row = r.rows[idx.covered];
      for (std::size_t i = 0; i < r.arity; ++i)
        if (mask >> i & 1U) h = mix(h, static_cast<std::uint64_t>(row[i]));
      idx.buckets[h].push_back(static_cast<std::uint32_t>(idx.covered));
    }
    auto it = idx.buckets.find(key);
    return it == idx.buckets.end() ? nullptr : &it->second;
  }
};

struct CArg {
  int var = -1;
  int value = -1;
};

struct CLit {
  bool is_eq = false;
  std::string relation;
  Store::Rel* rel = nullptr;
  std::vector<CArg> args;
};

struct CRule {
  const Rule* source = nullptr;
  Store::Rel* head = nullptr;
  std::vector<CArg> head_args;
  std::vector<CLit> body;
  int var_count = 0;
};

CRule compile_rule(const Rule& r, Store& store) {
  CRule out;
  out.source = &r;
  std::map<std::string, int> vars;
  auto arg = [&](const Term& t) {
    CArg a;
    if (t.is_const()) {
      a.value = store.domain.intern(t.value);
    } else {
      auto [it, fresh] = vars.emplace(t.name, static_cast<int>(vars.size()));
      a.var = it->second;
    }
    return a;
  };
  for (const auto& l : r.body) {
    CLit cl;
    cl.is_eq = l.kind == BodyLiteral::Kind::Eq;
    if (!cl.is_eq) {
      cl.relation = l.relation;
      cl.rel = &store.rel(l.relation, l.terms.size());
    }
    for (const auto& t : l.terms) cl.args.push_back(arg(t));
    out.body.push_back(std::move(cl));
  }
  for (const auto& t : r.head_terms) out.head_args.push_back(arg(t));
  out.head = &store.rel(r.head, r.head_terms.size());
  out.var_count = static_cast<int>(vars.size());
  return out;
}

// Evaluates one rule body.  Atom i == `delta` reads rows [lo, hi); other
// atoms read rows [0, hi_of(rel)).
class Joiner {
 public:
  Joiner(const CRule& r, int delta, std::size_t lo,
         const std::map<const Store::Rel*, std::size_t>& limits,
         std::vector<std::vector<int>>& out)
      : r_(r), delta_(delta), lo_(lo), limits_(limits), out_(out), env_(r.var_count, -1),
        done_(r.body.size(), false) {}

  void run() { rec(0); }

 private:
  int val(const CArg& a) const { return a.var >= 0 ? env_[a.var] : a.value; }

  std::size_t limit(const Store::Rel* rel) const {
    auto it = limits_.find(rel);
    return it == limits_.end() ? rel->rows.size() : it->second;
  }

  void emit() {
    std::vector<int> row;
    for (const auto& a : r_.head_args) row.push_back(val(a));
    out_.push_back(std::move(row));
  }

  void rec(std::size_t depth) {
    if (depth == r_.body.size()) {
      emit();
      return;
    }
    // Pick: evaluable equality, else the delta atom, else the atom with
    // most bound positions.
    int pick = -1;
    int best_bound = -1;
    for (std::size_t i = 0; i < r_.body.size(); ++i) {
      if (done_[i]) continue;
      const auto& l = r_.body[i];
      if (l.is_eq) {
        if (val(l.args[0]) >= 0 || val(l.args[1]) >= 0) {
          pick = static_cast<int>(i);
          break;
        }
        continue;
      }
      int b = 0;
      for (const auto& a : l.args)
        if (val(a) >= 0) ++b;
      if (static_cast<int>(i) == delta_) b += 1000;
      if (b > best_bound) {
        best_bound = b;
        pick = static_cast<int>(i);
      }
    }
    if (pick < 0) return;  // only unconstrained equalities left; rejected by validation
    done_[pick] = true;
    const auto& l = r_.body[pick];
    if (l.is_eq) {
      int a = val(l.args[0]);
      int b = val(l.args[1]);
      if (a >= 0 && b >= 0) {
        if (a == b) rec(depth + 1);
      } else {
        const CArg& target = a >= 0 ? l.args[1] : l.args[0];
        env_[target.var] = a >= 0 ? a : b;
        rec(depth + 1);
        env_[target.var] = -1;
      }
    } else {
      atom(l, pick == delta_, depth);
    }
    done_[pick] = false;
  }

  void try_row(const CLit& l, const std::vector<int>& row, std::size_t depth) {
    std::vector<int> set;
    bool ok = true;
    for (std::size_t i = 0; i < l.args.size() && ok; ++i) {
      int cur = val(l.args[i]);
      if (cur >= 0) {
        ok = cur == row[i];
      } else {
        env_[l.args[i].var] = row[i];
        set.push_back(l.args[i].var);
      }
    }
    if (ok) rec(depth + 1);
    for (int v : set) env_[v] = -1;
  }

  void atom(const CLit& l, bool is_delta, std::size_t depth) {
    Store::Rel& rel = *l.rel;
    std::size_t lo = is_delta ? lo_ : 0;
    std::size_t hi = limit(&rel);
    std::uint64_t mask = 0;
    std::uint64_t key = 0;
    for (std::size_t i = 0; i < l.args.size(); ++i)
      if (val(l.args[i]) >= 0) {
        mask |= 1ULL << i;
        key = mix(key, static_cast<std::uint64_t>(val(l.args[i])));
      }
    if (mask == 0 || is_delta) {
      for (std::size_t t = lo; t < hi; ++t) try_row(l, rel.rows[t], depth);
      return;
    }
    const auto* ids = Store::lookup(rel, mask, key, hi);
    if (!ids) return;
    for (auto t : *ids)
      if (t >= lo && t < hi) try_row(l, rel.rows[t], depth);
  }

  const CRule& r_;
  int delta_;
  std::size_t lo_;
  const std::map<const Store::Rel*, std::size_t>& limits_;
  std::vector<std::vector<int>>& out_;
  std::vector<int> env_;
  std::vector<bool> done_;
};

void load_edb(Store& store, const Database& d) {
  for (const auto& [name, arity] : d.schema()) {
    auto& rel = store.rel(name, arity);
    for (const auto& t : d.relation(name)) {
      std::vector<int> row;
      for (const auto& v : t) row.push_back(store.domain.intern(v));
      Store::add(rel, std::move(row));
    }
  }
}

void fixpoint(Store& store, const std::vector<const Rule*>& rules, FixpointStrategy strategy,
              const std::set<std::string>& idb) {
  std::vector<CRule> compiled;
  for (const auto* r : rules) compiled.push_back(compile_rule(*r, store));
  // Row ranges: [0, start) old, [start, end) last round's delta.
  std::map<const Store::Rel*, std::size_t> start;
  std::map<const Store::Rel*, std::size_t> end;
  for (auto& [name, rel] : store.rels) {
    start[&rel] = 0;
    end[&rel] = rel.rows.size();
  }
  bool first = true;
  for (;;) {
    std::vector<std::pair<Store::Rel*, std::vector<std::vector<int>>>> derived;
    for (const auto& cr : compiled) {
      std::vector<std::vector<int>> out;
      if (strategy == FixpointStrategy::Naive || first) {
        Joiner j(cr, -1, 0, end, out);
        j.run();
      } else {
        for (std::size_t i = 0; i < cr.body.size(); ++i) {
          const auto& l = cr.body[i];
          if (l.is_eq || !idb.contains(l.relation)) continue;
          std::size_t lo = start[l.rel];
          if (lo == end[l.rel]) continue;
          Joiner j(cr, static_cast<int>(i), lo, end, out);
          j.run();
        }
      }
      derived.emplace_back(cr.head, std::move(out));
    }
    for (auto& [name, rel] : store.rels) start[&rel] = rel.rows.size();
    bool changed = false;
    for (auto& [rel, rows] : derived)
      for (auto& row : rows)
        if (Store::add(*rel, std::move(row))) changed = true;
    for (auto& [name, rel] : store.rels) end[&rel] = rel.rows.size();
    first = false;
    if (!changed) break;
  }
}

// Recognized equivalence-closure predicate: per parameter tuple, the
// least equivalence over Dom containing the seed pairs, closed under the
// EGD rules.
struct EquivShape {
  std::string name;
  std::size_t params = 0;
  std::string dom;
  std::vector<const Rule*> seeds;  // Dom and equality bodies
  std::vector<const Rule*> egds;   // bodies with edb atoms
};

bool distinct_vars(const std::vector<Term>& ts, std::size_t n) {
  std::set<std::string> seen;
  for (std::size_t i = 0; i < n; ++i)
    if (!ts[i].is_var() || !seen.insert(ts[i].name).second) return false;
  return true;
}

bool same_prefix(const std::vector<Term>& a, const std::vector<Term>& b, std::size_t n) {
  return std::equal(a.begin(), a.begin() + static_cast<std::ptrdiff_t>(n), b.begin());
}

std::optional<EquivShape> recognize(const std::string& name, std::size_t arity,
                                    const DatalogProgram& p, const Schema& idb) {
  if (arity < 2) return std::nullopt;
  std::size_t n = arity - 2;
  EquivShape s;
  s.name = name;
  s.params = n;
  bool refl = false;
  bool trans = false;
  bool sym = false;
  for (const auto& r : p.rules) {
    bool mentions = false;
    for (const auto& l : r.body)
      if (l.kind == BodyLiteral::Kind::Atom && l.relation == name) mentions = true;
    if (r.head != name) {
      if (mentions) return std::nullopt;
      continue;
    }
    const auto& h = r.head_terms;
    if (!distinct_vars(h, n)) return std::nullopt;
    std::set<std::string> prefix;
    for (std::size_t i = 0; i < n; ++i) prefix.insert(h[i].name);
    // Transitivity and symmetry.
    if (r.body.size() == 2 && r.body[0].relation == name && r.body[1].relation == name &&
        h[n].is_var() && h[n + 1].is_var()) {
      const auto& a = r.body[0].terms;
      const auto& b = r.body[1].terms;
      if (same_prefix(a, h, n) && same_prefix(b, h, n) && a[n] == h[n] && b[n + 1] == h[n + 1] &&
          a[n + 1] == b[n] && a[n + 1].is_var() && a[n + 1] != h[n] && a[n + 1] != h[n + 1] &&
          !prefix.contains(a[n + 1].name) && h[n] != h[n + 1]) {
        trans = true;
        continue;
      }
    }
    if (r.body.size() == 1 && r.body[0].relation == name) {
      const auto& a = r.body[0].terms;
      if (same_prefix(a, h, n) && a[n] == h[n + 1] && a[n + 1] == h[n] && h[n] != h[n + 1] &&
          h[n].is_var() && h[n + 1].is_var()) {
        sym = true;
        continue;
      }
    }
    // Every other rule must guard each parameter with the Dom predicate.
    std::set<std::string> guarded;
    bool has_edb = false;
    for (const auto& l : r.body) {
      if (l.kind != BodyLiteral::Kind::Atom) continue;
      if (l.relation == name) {
        if (!same_prefix(l.terms, h, n)) return std::nullopt;
        continue;
      }
      if (l.terms.size() == 1 && idb.contains(l.relation) && l.terms[0].is_var()) {
        if (s.dom.empty()) s.dom = l.relation;
        if (l.relation == s.dom) {
          guarded.insert(l.terms[0].name);
          continue;
        }
      }
      if (idb.contains(l.relation)) return std::nullopt;
      has_edb = true;
    }
    for (const auto& v : prefix)
      if (!guarded.contains(v)) return std::nullopt;
    bool only_dom = std::all_of(r.body.begin(), r.body.end(), [&](const BodyLiteral& l) {
      return l.kind == BodyLiteral::Kind::Atom && l.relation == s.dom;
    });
    bool reflexive = only_dom && h[n] == h[n + 1] && h[n].is_var() && guarded.contains(h[n].name);
    if (reflexive) {
      refl = true;
      s.seeds.push_back(&r);
    } else if (has_edb) {
      // Closure atoms must be decided, not enumerated.
      std::set<std::string> edb_vars;
      for (const auto& l : r.body)
        if (l.kind == BodyLiteral::Kind::Atom && l.relation != name && l.relation != s.dom)
          for (const auto& t : l.terms)
            if (t.is_var()) edb_vars.insert(t.name);
      for (const auto& l : r.body)
        if (l.kind == BodyLiteral::Kind::Atom && l.relation == name)
          for (std::size_t i = n; i < n + 2; ++i)
            if (l.terms[i].is_var() && !edb_vars.contains(l.terms[i].name)) return std::nullopt;
      s.egds.push_back(&r);
    } else {
      for (const auto& l : r.body)
        if (l.kind == BodyLiteral::Kind::Atom && l.relation == name) return std::nullopt;
      s.seeds.push_back(&r);
    }
  }
  if (!refl || !trans || !sym || s.dom.empty()) return std::nullopt;
  return s;
}

class LazyEquiv final : public VirtualRelation {
 public:
  LazyEquiv(EquivShape shape, Domain& domain, const Database& extended)
      : shape_(std::move(shape)), domain_(domain) {
    for (const auto& t : extended.relation(shape_.dom)) dom_.insert(domain_.intern(t[0]));
    dom_list_.assign(dom_.begin(), dom_.end());
    for (const auto& [name, arity] : extended.schema()) {
      auto& rows = rels_[name];
      for (const auto& t : extended.relation(name)) {
        std::vector<int> row;
        for (const auto& v : t) row.push_back(domain_.intern(v));
        rows.push_back(std::move(row));
      }
    }
  }

  std::size_t arity() const override { return shape_.params + 2; }
  std::size_t bound_prefix() const override { return shape_.params; }

  bool contains(std::span<const int> t) const override {
    const Closure* c = closure(t.first(shape_.params));
    if (!c) return false;
    int a = t[shape_.params];
    int b = t[shape_.params + 1];
    auto ia = c->pos.find(a);
    auto ib = c->pos.find(b);
    if (ia == c->pos.end() || ib == c->pos.end()) return false;
    return c->find(ia->second) == c->find(ib->second);
  }

  bool match(std::span<const int> prefix,
             const std::function<bool(std::span<const int>)>& out) const override {
    const Closure* c = closure(prefix);
    if (!c) return false;
    std::vector<int> row(prefix.begin(), prefix.end());
    row.resize(shape_.params + 2);
    for (const auto& cls : c->classes)
      for (int a : cls)
        for (int b : cls) {
          row[shape_.params] = a;
          row[shape_.params + 1] = b;
          if (out(row)) return true;
        }
    return false;
  }

 private:
  struct Closure {
    std::unordered_map<int, int> pos;
    mutable std::vector<int> parent;
    std::vector<std::vector<int>> classes;

    int find(int i) const {
      while (parent[i] != i) {
        parent[i] = parent[parent[i]];
        i = parent[i];
      }
      return i;
    }
    bool unite(int a, int b) {
      a = find(a);
      b = find(b);
      if (a == b) return false;
      parent[std::max(a, b)] = std::min(a, b);
      return true;
    }
  };

  // Evaluate a rule body with the parameters fixed; `equal` decides atoms
  // over the closure predicate.  Calls `out` with the head's last two ids.
  void bodies(const Rule& r, std::span<const int> params, Closure& c,
              const std::function<void(int, int)>& out) const {
    std::map<std::string, int> env;
    for (std::size_t i = 0; i < shape_.params; ++i) env[r.head_terms[i].name] = params[i];
    std::vector<bool> done(r.body.size(), false);
    std::function<void()> rec = [&]() {
      int pick = -1;
      int best = -1;
      auto value = [&](const Term& t) {
        if (t.is_const()) return domain_.intern(t.value);
        auto it = env.find(t.name);
        return it == env.end() ? -1 : it->second;
      };
      for (std::size_t i = 0; i < r.body.size(); ++i) {
        if (done[i]) continue;
        const auto& l = r.body[i];
        int bound = 0;
        bool all = true;
        for (const auto& t : l.terms) {
          if (value(t) >= 0) {
            ++bound;
          } else {
            all = false;
          }
        }
        int score;
        if (all) {
          score = 10000;
        } else if (l.kind == BodyLiteral::Kind::Eq) {
          score = bound > 0 ? 5000 : -1;
        } else if (l.relation == shape_.name) {
          score = -1;
        } else if (l.relation == shape_.dom) {
          score = 0;
        } else {
          score = bound;
        }
        if (score > best) {
          best = score;
          pick = static_cast<int>(i);
        }
      }
      if (pick < 0) {
        int a = value(r.head_terms[shape_.params]);
        int b = value(r.head_terms[shape_.params + 1]);
        out(a, b);
        return;
      }
      if (best < 0) return;
      const auto& l = r.body[pick];
      done[pick] = true;
      if (best == 10000) {
        bool ok;
        if (l.kind == BodyLiteral::Kind::Eq) {
          ok = value(l.terms[0]) == value(l.terms[1]);
        } else if (l.relation == shape_.dom) {
          ok = dom_.contains(value(l.terms[0]));
        } else if (l.relation == shape_.name) {
          int a = value(l.terms[shape_.params]);
          int b = value(l.terms[shape_.params + 1]);
          auto ia = c.pos.find(a);
          auto ib = c.pos.find(b);
          ok = ia != c.pos.end() && ib != c.pos.end() && c.find(ia->second) == c.find(ib->second);
        } else {
          ok = false;
          auto it = rels_.find(l.relation);
          if (it != rels_.end()) {
            std::vector<int> row;
            for (const auto& t : l.terms) row.push_back(value(t));
            ok = std::find(it->second.begin(), it->second.end(), row) != it->second.end();
          }
        }
        if (ok) rec();
      } else if (l.kind == BodyLiteral::Kind::Eq) {
        int a = value(l.terms[0]);
        const Term& target = a >= 0 ? l.terms[1] : l.terms[0];
        env[target.name] = a >= 0 ? a : value(l.terms[1]);
        rec();
        env.erase(target.name);
      } else if (l.relation == shape_.dom) {
        for (int v : dom_list_) {
          env[l.terms[0].name] = v;
          rec();
        }
        env.erase(l.terms[0].name);
      } else {
        auto it = rels_.find(l.relation);
        if (it != rels_.end()) {
          for (const auto& row : it->second) {
            std::vector<std::string> set;
            bool ok = true;
            for (std::size_t i = 0; i < l.terms.size() && ok; ++i) {
              int cur = value(l.terms[i]);
              if (cur >= 0) {
                ok = cur == row[i];
              } else {
                env[l.terms[i].name] = row[i];
                set.push_back(l.terms[i].name);
              }
            }
            if (ok) rec();
            for (const auto& v : set) env.erase(v);
          }
        }
      }
      done[pick] = false;
    };
    rec();
  }

  const Closure* closure(std::span<const int> params) const {
    std::vector<int> key(params.begin(), params.end());
    auto it = cache_.find(key);
    if (it != cache_.end()) return it->second.get();
    std::unique_ptr<Closure> c;
    bool in_dom = true;
    for (int v : key)
      if (!dom_.contains(v)) in_dom = false;
    if (in_dom) {
      c = std::make_unique<Closure>();
      for (std::size_t i = 0; i < dom_list_.size(); ++i) {
        c->pos[dom_list_[i]] = static_cast<int>(i);
        c->parent.push_back(static_cast<int>(i));
      }
      auto merge = [&](int a, int b) -> bool {
        auto ia = c->pos.find(a);
        auto ib = c->pos.find(b);
        if (ia == c->pos.end() || ib == c->pos.end()) return false;
        return c->unite(ia->second, ib->second);
      };
      for (const auto* r : shape_.seeds) bodies(*r, params, *c, [&](int a, int b) { merge(a, b); });
      for (bool changed = true; changed;) {
        changed = false;
        for (const auto* r : shape_.egds)
          bodies(*r, params, *c, [&](int a, int b) { changed = merge(a, b) || changed; });
      }
      std::map<int, std::vector<int>> groups;
      for (std::size_t i = 0; i < dom_list_.size(); ++i)
        groups[c->find(static_cast<int>(i))].push_back(dom_list_[i]);
      for (auto& [_, g] : groups) c->classes.push_back(std::move(g));
    }
    const Closure* raw = c.get();
    cache_.emplace(std::move(key), std::move(c));
    return raw;
  }

  EquivShape shape_;
  Domain& domain_;
  std::set<int> dom_;
  std::vector<int> dom_list_;
  std::map<std::string, std::vector<std::vector<int>>> rels_;
  mutable std::map<std::vector<int>, std::unique_ptr<Closure>> cache_;
};

Database to_database(const Store& store, const Database& d) {
  Database out = d;
  for (const auto& [name, rel] : store.rels) {
    if (d.has_relation(name)) continue;
    out.declare(name, rel.arity);
    for (const auto& row : rel.rows) {
      Tuple t;
      for (int id : row) t.push_back(store.domain.value(id));
      out.insert(name, std::move(t));
    }
  }
  return out;
}

Database stratum_one(const DatalogProgram& p, const Database& d, FixpointStrategy strategy,
                     const std::set<std::string>& skip) {
  Store store;
  load_edb(store, d);
  Schema idb_schema = p.idb_schema();
  std::set<std::string> idb;
  for (const auto& [name, arity] : idb_schema) {
    if (skip.contains(name)) continue;
    idb.insert(name);
    store.rel(name, arity);
  }
  std::vector<const Rule*> rules;
  for (const auto& r : p.rules)
    if (!skip.contains(r.head)) rules.push_back(&r);
  fixpoint(store, rules,
           strategy == FixpointStrategy::Naive ? FixpointStrategy::Naive
                                               : FixpointStrategy::SemiNaive,
           idb);
  return to_database(store, d);
}

}  // namespace

Database materialize_idb(const DatalogProgram& p, const Database& d, FixpointStrategy strategy) {
  validate_program(p, d);
  return stratum_one(p, d, strategy, {});
}

TupleSet eval_program(const DatalogProgram& p, const Database& d, ProgramOptions options) {
  validate_program(p, d);
  std::vector<EquivShape> lazy;
  std::set<std::string> skip;
  if (options.strategy == FixpointStrategy::Auto) {
    Schema idb = p.idb_schema();
    for (const auto& [name, arity] : idb)
      if (auto s = recognize(name, arity, p, idb)) {
        skip.insert(name);
        lazy.push_back(std::move(*s));
      }
  }
  Database extended = stratum_one(p, d, options.strategy, skip);
  Evaluator ev(extended, p.constants());
  for (auto& s : lazy) {
    std::string name = s.name;
    ev.add_virtual(name, std::make_shared<LazyEquiv>(std::move(s), ev.domain(), extended));
  }
  return ev.answers(p.fo_layer, p.answer_vars);
}

std::string emit_text(const DatalogProgram& p) {
  std::string out;
  if (!p.answer_vars.empty()) {
    out += "%% ANSWER";
    for (const auto& v : p.answer_vars) out += " " + v;
    out += "\n";
  }
  for (const auto& r : p.rules) out += r.to_string() + "\n";
  out += "%% FO LAYER\n" + p.fo_layer.to_string() + "\n";
  return out;
}

DatalogProgram parse_program(std::string_view text) {
  DatalogProgram p;
  std::string rules_text;
  std::string fo_text;
  bool in_fo = false;
  bool has_answer = false;
  std::size_t pos = 0;
  std::size_t fo_line = 0;
  std::size_t line_no = 0;
  while (pos <= text.size()) {
    std::size_t nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    std::string_view line = text.substr(pos, nl - pos);
    ++line_no;
    std::string_view trimmed = line;
    while (!trimmed.empty() && (trimmed.front() == ' ' || trimmed.front() == '\t'))
      trimmed.remove_prefix(1);
    if (trimmed.starts_with("%%")) {
      std::string_view rest = trimmed.substr(2);
      while (!rest.empty() && rest.front() == ' ') rest.remove_prefix(1);
      if (rest.starts_with("FO LAYER")) {
        in_fo = true;
        fo_line = line_no;
      } else if (rest.starts_with("ANSWER")) {
        has_answer = true;
        auto toks = detail::tokenize(rest.substr(6), false);
        for (const auto& t : toks)
          if (t.kind == detail::Tok::Ident) p.answer_vars.push_back(t.text);
      }
      rules_text += "\n";
    } else if (in_fo) {
      fo_text += std::string(line) + "\n";
    } else {
      rules_text += std::string(line) + "\n";
    }
    pos = nl + 1;
  }

  using detail::Tok;
  detail::TokenStream ts(detail::tokenize(rules_text, false));
  auto term = [&]() {
    if (ts.at(Tok::Ident)) return Term::var(ts.next().text);
    if (ts.at(Tok::Int) || ts.at(Tok::Str)) return Term::constant(detail::parse_value(ts));
    ts.fail("expected a term");
  };
  auto args = [&]() {
    std::vector<Term> out;
    ts.expect(Tok::LParen);
    if (!ts.at(Tok::RParen)) {
      do {
        out.push_back(term());
      } while (ts.accept(Tok::Comma));
    }
    ts.expect(Tok::RParen);
    return out;
  };
  while (!ts.at(Tok::End)) {
    Rule r;
    r.head = ts.expect(Tok::Ident, "(rule head)").text;
    r.head_terms = args();
    if (ts.accept(Tok::ColonDash)) {
      do {
        if (ts.at(Tok::Ident) && ts.peek(1).kind == Tok::LParen) {
          std::string rel = ts.next().text;
          r.body.push_back(BodyLiteral::atom(rel, args()));
        } else {
          Term a = term();
          ts.expect(Tok::Eq, "in body equality");
          r.body.push_back(BodyLiteral::eq(a, term()));
        }
      } while (ts.accept(Tok::Comma));
    }
    ts.expect(Tok::Dot, "after rule");
    p.rules.push_back(std::move(r));
  }
  if (in_fo) {
    try {
      p.fo_layer = parse_formula(fo_text);
    } catch (const SyntaxError& e) {
      throw SyntaxError(e.what(), fo_line + e.line(), e.column());
    }
  }
  if (!has_answer) p.answer_vars = p.fo_layer.free_variables();
  return p;
}

}  // namespace nullq
