#include "nullq/egd.hpp"

#include <algorithm>

#include "egd_match.hpp"
#include "lexer.hpp"
#include "nullq/errors.hpp"

namespace nullq {

namespace {

std::string join_args(const std::vector<std::string>& vs) {
  std::string out;
  for (std::size_t i = 0; i < vs.size(); ++i) {
    if (i) out += ", ";
    out += vs[i];
  }
  return out;
}

}  // namespace

std::string RawEgd::to_string() const {
  std::string out;
  for (const auto& a : atoms) {
    if (!out.empty()) out += " & ";
    out += a.relation + "(";
    for (std::size_t i = 0; i < a.args.size(); ++i) {
      if (i) out += ", ";
      out += a.args[i].to_string();
    }
    out += ")";
  }
  for (const auto& [l, r] : equalities) out += " & " + l.to_string() + " = " + r.to_string();
  out += " -> " + head.first.to_string() + " = " + head.second.to_string() + " .";
  return out;
}

Egd Egd::functional_dependency(const std::string& relation, std::size_t arity,
                               const std::vector<std::size_t>& lhs, std::size_t rhs) {
  if (rhs >= arity) throw ValidationError("dependency position out of range");
  Egd e;
  Atom a{relation, {}};
  Atom b{relation, {}};
  for (std::size_t i = 0; i < arity; ++i) {
    a.vars.push_back("u" + std::to_string(i + 1));
    b.vars.push_back("u" + std::to_string(arity + i + 1));
  }
  for (std::size_t p : lhs) {
    if (p >= arity) throw ValidationError("dependency position out of range");
    e.psi.emplace_back(a.vars[p], b.vars[p]);
  }
  e.head = {a.vars[rhs], b.vars[rhs]};
  e.body = {std::move(a), std::move(b)};
  return e;
}

std::vector<std::string> Egd::variables() const {
  std::vector<std::string> out;
  for (const auto& a : body) out.insert(out.end(), a.vars.begin(), a.vars.end());
  return out;
}

Schema Egd::relations() const {
  Schema out;
  for (const auto& a : body) {
    auto [it, fresh] = out.emplace(a.relation, a.vars.size());
    if (!fresh && it->second != a.vars.size())
      throw SchemaError("relation " + a.relation + " used with two arities in an EGD");
  }
  return out;
}

RawEgd Egd::to_raw() const {
  RawEgd r;
  for (const auto& a : body) {
    RawEgd::Atom ra{a.relation, {}};
    for (const auto& v : a.vars) ra.args.push_back(Term::var(v));
    r.atoms.push_back(std::move(ra));
  }
  for (const auto& [l, rr] : psi) r.equalities.emplace_back(Term::var(l), Term::var(rr));
  r.head = {Term::var(head.first), Term::var(head.second)};
  return r;
}

std::string Egd::to_string() const {
  std::string out;
  for (const auto& a : body) {
    if (!out.empty()) out += " & ";
    out += a.relation + "(" + join_args(a.vars) + ")";
  }
  for (const auto& [l, r] : psi) out += " & " + l + " = " + r;
  out += " -> " + head.first + " = " + head.second + " .";
  return out;
}

Egd normalize_egd(const RawEgd& raw) {
  if (raw.atoms.empty()) throw ValidationError("EGD without body atoms");
  std::set<std::string> all;
  for (const auto& a : raw.atoms)
    for (const auto& t : a.args)
      if (t.is_var()) all.insert(t.name);
  NameSupply names(all);
  Egd e;
  std::set<std::string> seen;
  for (const auto& a : raw.atoms) {
    Egd::Atom na{a.relation, {}};
    for (const auto& t : a.args) {
      if (t.is_const()) throw UnsupportedError("constants are not supported in EGDs: " + raw.to_string());
      if (seen.insert(t.name).second) {
        na.vars.push_back(t.name);
      } else {
        std::string fresh = names.fresh(t.name);
        na.vars.push_back(fresh);
        e.psi.emplace_back(t.name, fresh);
      }
    }
    e.body.push_back(std::move(na));
  }
  auto body_var = [&](const Term& t) -> const std::string& {
    if (t.is_const()) throw UnsupportedError("constants are not supported in EGDs: " + raw.to_string());
    if (!seen.contains(t.name))
      throw ValidationError("EGD variable " + t.name + " does not occur in the body");
    return t.name;
  };
  for (const auto& [l, r] : raw.equalities) e.psi.emplace_back(body_var(l), body_var(r));
  e.head = {body_var(raw.head.first), body_var(raw.head.second)};
  if (e.head.first == e.head.second)
    throw ValidationError("EGD head must equate two distinct variables: " + raw.to_string());
  e.relations();
  return e;
}

EgdSet parse_constraints(std::string_view text) {
  using detail::Tok;
  detail::TokenStream ts(detail::tokenize(text, false));
  auto term = [&]() {
    if (ts.at(Tok::Ident)) return Term::var(ts.next().text);
    if (ts.at(Tok::Int) || ts.at(Tok::Str)) return Term::constant(detail::parse_value(ts));
    ts.fail("expected a term");
  };
  EgdSet out;
  while (!ts.at(Tok::End)) {
    RawEgd raw;
    do {
      if (ts.at(Tok::Ident) && ts.peek(1).kind == Tok::LParen) {
        RawEgd::Atom a{ts.next().text, {}};
        ts.next();
        if (!ts.at(Tok::RParen)) {
          do {
            a.args.push_back(term());
          } while (ts.accept(Tok::Comma));
        }
        ts.expect(Tok::RParen, "closing atom");
        raw.atoms.push_back(std::move(a));
      } else {
        Term l = term();
        ts.expect(Tok::Eq, "in equality");
        raw.equalities.emplace_back(l, term());
      }
    } while (ts.accept(Tok::Amp));
    ts.expect(Tok::Arrow, "before EGD head");
    Term l = term();
    ts.expect(Tok::Eq, "in EGD head");
    raw.head = {l, term()};
    ts.accept(Tok::Dot);
    out.push_back(normalize_egd(raw));
  }
  return out;
}

namespace detail {

namespace {

bool match_from(const Database& d, const Egd& e, std::size_t atom, Binding& b,
                const std::function<bool(const Binding&)>& fn) {
  if (atom == e.body.size()) return fn(b);
  const auto& a = e.body[atom];
  for (const auto& t : d.relation(a.relation)) {
    for (std::size_t i = 0; i < a.vars.size(); ++i) b[a.vars[i]] = t[i];
    bool ok = true;
    for (const auto& [l, r] : e.psi) {
      auto li = b.find(l);
      auto ri = b.find(r);
      if (li != b.end() && ri != b.end() && li->second != ri->second) {
        ok = false;
        break;
      }
    }
    if (ok && match_from(d, e, atom + 1, b, fn)) return true;
  }
  for (const auto& v : a.vars) b.erase(v);
  return false;
}

}  // namespace

bool for_each_body_match(const Database& d, const Egd& e,
                         const std::function<bool(const Binding&)>& fn) {
  Binding b;
  return match_from(d, e, 0, b, fn);
}

}  // namespace detail

bool satisfies_egds(const Database& d, const EgdSet& sigma) {
  for (const auto& e : sigma)
    for (const auto& [rel, arity] : e.relations()) {
      auto ar = d.arity(rel);
      if (!ar) throw SchemaError("EGD mentions unknown relation " + rel);
      if (*ar != arity) throw SchemaError("EGD uses " + rel + " with the wrong arity");
    }
  for (const auto& e : sigma) {
    bool violated = detail::for_each_body_match(d, e, [&](const detail::Binding& b) {
      return b.at(e.head.first) != b.at(e.head.second);
    });
    if (violated) return false;
  }
  return true;
}

Schema relations(const EgdSet& sigma) {
  Schema out;
  for (const auto& e : sigma)
    for (const auto& [rel, arity] : e.relations()) {
      auto [it, fresh] = out.emplace(rel, arity);
      if (!fresh && it->second != arity)
        throw SchemaError("relation " + rel + " used with two arities in the constraints");
    }
  return out;
}

}  // namespace nullq
