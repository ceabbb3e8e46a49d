#include "nullq/database.hpp"

#include "lexer.hpp"
#include "nullq/errors.hpp"

namespace nullq {

Database::Database(const Schema& schema) { declare(schema); }

void Database::declare(const std::string& name, std::size_t arity) {
  auto it = schema_.find(name);
  if (it != schema_.end()) {
    if (it->second != arity)
      throw SchemaError("relation " + name + " declared with arity " + std::to_string(it->second) +
                        ", used with arity " + std::to_string(arity));
    return;
  }
  schema_.emplace(name, arity);
  relations_[name];
}

void Database::declare(const Schema& schema) {
  for (const auto& [name, arity] : schema) declare(name, arity);
}

void Database::insert(const std::string& name, Tuple tuple) {
  declare(name, tuple.size());
  relations_[name].insert(std::move(tuple));
}

std::optional<std::size_t> Database::arity(const std::string& name) const {
  auto it = schema_.find(name);
  if (it == schema_.end()) return std::nullopt;
  return it->second;
}

const TupleSet& Database::relation(const std::string& name) const {
  static const TupleSet empty;
  auto it = relations_.find(name);
  return it == relations_.end() ? empty : it->second;
}

std::size_t Database::size() const {
  std::size_t n = 0;
  for (const auto& [_, rel] : relations_) n += rel.size();
  return n;
}

std::set<Value> Database::active_domain() const {
  std::set<Value> out;
  for (const auto& [_, rel] : relations_)
    for (const auto& t : rel) out.insert(t.begin(), t.end());
  return out;
}

std::set<Value> Database::constants() const {
  std::set<Value> out;
  for (const auto& v : active_domain())
    if (v.is_constant()) out.insert(v);
  return out;
}

std::set<Value> Database::nulls() const {
  std::set<Value> out;
  for (const auto& v : active_domain())
    if (v.is_null()) out.insert(v);
  return out;
}

bool Database::is_complete() const {
  for (const auto& [_, rel] : relations_)
    for (const auto& t : rel)
      for (const auto& v : t)
        if (v.is_null()) return false;
  return true;
}

std::string Database::to_text() const {
  std::string out;
  for (const auto& [name, rel] : relations_)
    for (const auto& t : rel) out += name + "(" + nullq::to_string(t) + ").\n";
  return out;
}

Database parse_database(std::string_view text) {
  using detail::Tok;
  detail::TokenStream ts(detail::tokenize(text, true));
  Database d;
  while (!ts.at(Tok::End)) {
    detail::Token name = ts.expect(Tok::Ident, "(relation name)");
    Tuple t = detail::parse_tuple(ts);
    ts.expect(Tok::Dot, "after fact");
    try {
      d.insert(name.text, std::move(t));
    } catch (const SchemaError& e) {
      throw SchemaError(std::to_string(name.line) + ":" + std::to_string(name.column) + ": " + e.what());
    }
  }
  return d;
}

Valuation::Valuation(std::map<std::string, Value> mapping) {
  for (auto& [k, v] : mapping) assign(k, std::move(v));
}

void Valuation::assign(const std::string& null_name, Value constant) {
  if (constant.is_null()) throw DomainError("valuation maps _" + null_name + " to a null");
  mapping_[null_name] = std::move(constant);
}

std::optional<Value> Valuation::image(const std::string& null_name) const {
  auto it = mapping_.find(null_name);
  if (it == mapping_.end()) return std::nullopt;
  return it->second;
}

Value Valuation::apply(const Value& v) const {
  if (!v.is_null()) return v;
  auto it = mapping_.find(v.text());
  if (it == mapping_.end()) throw DomainError("valuation undefined on _" + v.text());
  return it->second;
}

Tuple Valuation::apply(const Tuple& t) const {
  Tuple out;
  out.reserve(t.size());
  for (const auto& v : t) out.push_back(apply(v));
  return out;
}

Database apply_valuation(const Valuation& v, const Database& d) {
  Database out(d.schema());
  for (const auto& [name, rel] : d.relations())
    for (const auto& t : rel) out.insert(name, v.apply(t));
  return out;
}

Database rename_values(const Database& d, const std::map<Value, Value>& renaming) {
  Database out(d.schema());
  for (const auto& [name, rel] : d.relations())
    for (const auto& t : rel) {
      Tuple r;
      r.reserve(t.size());
      for (const auto& v : t) {
        auto it = renaming.find(v);
        r.push_back(it == renaming.end() ? v : it->second);
      }
      out.insert(name, std::move(r));
    }
  return out;
}

}  // namespace nullq
