#include "nullq/formula.hpp"

#include <algorithm>
#include <functional>

#include "nullq/errors.hpp"

namespace nullq {

Formula::Formula() : Formula(truth()) {}

Formula Formula::make(Node n) { return Formula(std::make_shared<const Node>(std::move(n))); }

Formula Formula::truth() {
  static const Formula t = make(Node{NodeKind::True, {}, {}, {}, {}});
  return t;
}

Formula Formula::falsity() {
  static const Formula f = make(Node{NodeKind::False, {}, {}, {}, {}});
  return f;
}

Formula Formula::atom(std::string relation, std::vector<Term> args) {
  return make(Node{NodeKind::Atom, std::move(relation), std::move(args), {}, {}});
}

Formula Formula::eq(Term a, Term b) {
  return make(Node{NodeKind::Eq, {}, {std::move(a), std::move(b)}, {}, {}});
}

Formula Formula::is_null(Term t) { return make(Node{NodeKind::IsNull, {}, {std::move(t)}, {}, {}}); }

Formula Formula::negate(Formula f) { return make(Node{NodeKind::Not, {}, {}, {}, {std::move(f)}}); }

Formula Formula::conj(std::vector<Formula> fs) {
  if (fs.empty()) return truth();
  if (fs.size() == 1) return fs.front();
  return make(Node{NodeKind::And, {}, {}, {}, std::move(fs)});
}

Formula Formula::disj(std::vector<Formula> fs) {
  if (fs.empty()) return falsity();
  if (fs.size() == 1) return fs.front();
  return make(Node{NodeKind::Or, {}, {}, {}, std::move(fs)});
}

Formula Formula::exists(std::vector<std::string> vars, Formula body) {
  if (vars.empty()) return body;
  return make(Node{NodeKind::Exists, {}, {}, std::move(vars), {std::move(body)}});
}

Formula Formula::forall(std::vector<std::string> vars, Formula body) {
  if (vars.empty()) return body;
  return make(Node{NodeKind::Forall, {}, {}, std::move(vars), {std::move(body)}});
}

Formula Formula::implies(Formula a, Formula b) { return disj({negate(std::move(a)), std::move(b)}); }

bool operator==(const Formula& a, const Formula& b) {
  if (a.node_ == b.node_) return true;
  const auto& x = *a.node_;
  const auto& y = *b.node_;
  return x.kind == y.kind && x.relation == y.relation && x.terms == y.terms && x.vars == y.vars &&
         x.children == y.children;
}

namespace {

void collect_free(const Formula& f, std::vector<std::string>& bound, std::vector<std::string>& out) {
  auto term = [&](const Term& t) {
    if (!t.is_var()) return;
    if (std::find(bound.begin(), bound.end(), t.name) != bound.end()) return;
    if (std::find(out.begin(), out.end(), t.name) == out.end()) out.push_back(t.name);
  };
  switch (f.kind()) {
    case NodeKind::Atom:
    case NodeKind::Eq:
    case NodeKind::IsNull:
      for (const auto& t : f.terms()) term(t);
      break;
    case NodeKind::Exists:
    case NodeKind::Forall: {
      std::size_t mark = bound.size();
      bound.insert(bound.end(), f.bound_vars().begin(), f.bound_vars().end());
      collect_free(f.child(), bound, out);
      bound.resize(mark);
      break;
    }
    default:
      for (const auto& c : f.children()) collect_free(c, bound, out);
  }
}

void visit(const Formula& f, const std::function<void(const Formula&)>& fn) {
  fn(f);
  for (const auto& c : f.children()) visit(c, fn);
}

}  // namespace

std::vector<std::string> Formula::free_variables() const {
  std::vector<std::string> bound;
  std::vector<std::string> out;
  collect_free(*this, bound, out);
  return out;
}

std::set<Value> Formula::constants() const {
  std::set<Value> out;
  visit(*this, [&](const Formula& g) {
    for (const auto& t : g.terms())
      if (t.is_const()) out.insert(t.value);
  });
  return out;
}

std::set<std::string> Formula::all_variables() const {
  std::set<std::string> out;
  visit(*this, [&](const Formula& g) {
    for (const auto& t : g.terms())
      if (t.is_var()) out.insert(t.name);
    out.insert(g.bound_vars().begin(), g.bound_vars().end());
  });
  return out;
}

Schema Formula::relations() const {
  Schema out;
  visit(*this, [&](const Formula& g) {
    if (g.kind() != NodeKind::Atom) return;
    auto [it, fresh] = out.emplace(g.relation(), g.terms().size());
    if (!fresh && it->second != g.terms().size())
      throw SchemaError("relation " + g.relation() + " used with arities " +
                        std::to_string(it->second) + " and " + std::to_string(g.terms().size()));
  });
  return out;
}

namespace {

int precedence(NodeKind k) {
  switch (k) {
    case NodeKind::Or: return 1;
    case NodeKind::And: return 3;
    case NodeKind::Not:
    case NodeKind::Exists:
    case NodeKind::Forall: return 4;
    default: return 5;
  }
}

void print(const Formula& f, std::string& out);

void print_child(const Formula& c, int min_prec, std::string& out) {
  if (precedence(c.kind()) < min_prec) {
    out += '(';
    print(c, out);
    out += ')';
  } else {
    print(c, out);
  }
}

void print(const Formula& f, std::string& out) {
  switch (f.kind()) {
    case NodeKind::True: out += "true"; break;
    case NodeKind::False: out += "false"; break;
    case NodeKind::Atom:
      out += f.relation();
      out += '(';
      for (std::size_t i = 0; i < f.terms().size(); ++i) {
        if (i) out += ", ";
        out += f.terms()[i].to_string();
      }
      out += ')';
      break;
    case NodeKind::Eq:
      out += f.terms()[0].to_string();
      out += " = ";
      out += f.terms()[1].to_string();
      break;
    case NodeKind::IsNull:
      out += "isnull(" + f.terms()[0].to_string() + ")";
      break;
    case NodeKind::Not:
      out += '!';
      print_child(f.child(), 4, out);
      break;
    case NodeKind::And:
    case NodeKind::Or: {
      const char* sep = f.kind() == NodeKind::And ? " & " : " | ";
      int min = precedence(f.kind()) + 1;
      for (std::size_t i = 0; i < f.children().size(); ++i) {
        if (i) out += sep;
        print_child(f.children()[i], min, out);
      }
      break;
    }
    case NodeKind::Exists:
    case NodeKind::Forall:
      out += f.kind() == NodeKind::Exists ? "exists" : "forall";
      for (const auto& v : f.bound_vars()) out += " " + v;
      out += " (";
      print(f.child(), out);
      out += ')';
      break;
  }
}

}  // namespace

std::string Formula::to_string() const {
  std::string out;
  print(*this, out);
  return out;
}

namespace {

Term subst_term(const Term& t, const std::map<std::string, Term>& s) {
  if (!t.is_var()) return t;
  auto it = s.find(t.name);
  return it == s.end() ? t : it->second;
}

Formula subst(const Formula& f, const std::map<std::string, Term>& s) {
  if (s.empty()) return f;
  switch (f.kind()) {
    case NodeKind::True:
    case NodeKind::False: return f;
    case NodeKind::Atom: {
      std::vector<Term> args;
      for (const auto& t : f.terms()) args.push_back(subst_term(t, s));
      return Formula::atom(f.relation(), std::move(args));
    }
    case NodeKind::Eq: return Formula::eq(subst_term(f.terms()[0], s), subst_term(f.terms()[1], s));
    case NodeKind::IsNull: return Formula::is_null(subst_term(f.terms()[0], s));
    case NodeKind::Not: return Formula::negate(subst(f.child(), s));
    case NodeKind::And:
    case NodeKind::Or: {
      std::vector<Formula> cs;
      for (const auto& c : f.children()) cs.push_back(subst(c, s));
      return f.kind() == NodeKind::And ? Formula::conj(std::move(cs)) : Formula::disj(std::move(cs));
    }
    case NodeKind::Exists:
    case NodeKind::Forall: {
      std::map<std::string, Term> inner = s;
      for (const auto& v : f.bound_vars()) inner.erase(v);
      std::set<std::string> incoming;
      auto free = f.child().free_variables();
      for (const auto& v : free) {
        auto it = inner.find(v);
        if (it != inner.end() && it->second.is_var()) incoming.insert(it->second.name);
      }
      NameSupply names(f.child().all_variables());
      names.reserve(incoming);
      for (const auto& [k, t] : inner)
        if (t.is_var()) names.reserve(t.name);
      std::vector<std::string> vars;
      for (const auto& v : f.bound_vars()) {
        if (incoming.contains(v)) {
          std::string r = names.fresh(v);
          inner[v] = Term::var(r);
          vars.push_back(r);
        } else {
          vars.push_back(v);
        }
      }
      Formula body = subst(f.child(), inner);
      return f.kind() == NodeKind::Exists ? Formula::exists(std::move(vars), std::move(body))
                                          : Formula::forall(std::move(vars), std::move(body));
    }
  }
  return f;
}

}  // namespace

Formula substitute(const Formula& f, const std::map<std::string, Term>& subst_map) {
  return subst(f, subst_map);
}

const char* to_string(QueryClass c) {
  switch (c) {
    case QueryClass::CQ: return "CQ";
    case QueryClass::UCQ: return "UCQ";
    case QueryClass::BCCQ: return "BCCQ";
    case QueryClass::FO: return "FO";
  }
  return "?";
}

namespace {

// 0 = CQ, 1 = positive existential, 2 = Boolean combination, 3 = other.
int rank(const Formula& f) {
  switch (f.kind()) {
    case NodeKind::True:
    case NodeKind::Atom:
    case NodeKind::Eq: return 0;
    case NodeKind::False: return 1;
    case NodeKind::IsNull: return 3;
    case NodeKind::Not: return rank(f.child()) <= 2 ? 2 : 3;
    case NodeKind::And:
    case NodeKind::Or: {
      int r = f.kind() == NodeKind::Or ? 1 : 0;
      for (const auto& c : f.children()) r = std::max(r, rank(c));
      return r;
    }
    case NodeKind::Exists: {
      int r = rank(f.child());
      return r <= 1 ? r : 3;
    }
    case NodeKind::Forall: return 3;
  }
  return 3;
}

}  // namespace

QueryClass classify(const Formula& f) { return static_cast<QueryClass>(rank(f)); }

Query Query::from(Formula f) {
  auto vars = f.free_variables();
  return from(std::move(f), std::move(vars));
}

Query Query::from(Formula f, std::vector<std::string> answer_vars) {
  for (const auto& v : f.free_variables())
    if (std::find(answer_vars.begin(), answer_vars.end(), v) == answer_vars.end())
      throw Error("free variable " + v + " is not an answer variable");
  Query q;
  q.query_class = classify(f);
  q.formula = std::move(f);
  q.answer_vars = std::move(answer_vars);
  return q;
}

std::string NameSupply::fresh(const std::string& base) {
  if (!used_.contains(base)) {
    used_.insert(base);
    return base;
  }
  std::size_t& n = counters_[base + "_"];
  std::string name;
  do {
    name = base + "_" + std::to_string(++n);
  } while (used_.contains(name));
  used_.insert(name);
  return name;
}

std::string NameSupply::next(const std::string& base) {
  std::size_t& n = counters_[base];
  std::string name;
  do {
    name = base + std::to_string(++n);
  } while (used_.contains(name));
  used_.insert(name);
  return name;
}

}  // namespace nullq
