#include "nullq/chase.hpp"

#include <random>
#include <vector>

#include "egd_match.hpp"
#include "nullq/errors.hpp"

namespace nullq {

namespace {

struct Violation {
  Value a;
  Value b;
};

std::vector<Violation> violations(const Database& d, const EgdSet& sigma, bool first_only) {
  std::vector<Violation> out;
  for (const auto& e : sigma) {
    bool stop = detail::for_each_body_match(d, e, [&](const detail::Binding& b) {
      const Value& x = b.at(e.head.first);
      const Value& y = b.at(e.head.second);
      if (x == y) return false;
      out.push_back({x, y});
      return first_only;
    });
    if (stop) break;
  }
  return out;
}

Database replace(const Database& d, const Value& from, const Value& to) {
  return rename_values(d, {{from, to}});
}

}  // namespace

ChaseResult chase(const Database& d, const EgdSet& sigma, ChaseOptions options) {
  for (const auto& [rel, arity] : relations(sigma)) {
    auto ar = d.arity(rel);
    if (!ar) throw SchemaError("EGD mentions unknown relation " + rel);
    if (*ar != arity) throw SchemaError("EGD uses " + rel + " with the wrong arity");
  }
  ChaseResult res;
  res.database = d;
  for (const auto& n : d.nulls()) res.substitution.emplace(n, n);
  auto redirect = [&](const Value& from, const Value& to) {
    res.database = replace(res.database, from, to);
    for (auto& [n, img] : res.substitution)
      if (img == from) img = to;
  };
  std::mt19937_64 rng(options.shuffle_seed.value_or(0));
  for (;;) {
    auto vs = violations(res.database, sigma, !options.shuffle_seed);
    if (vs.empty()) return res;
    Violation v = vs.front();
    if (options.shuffle_seed) v = vs[rng() % vs.size()];
    ++res.steps;
    if (v.a.is_constant() && v.b.is_constant()) {
      res.failed = true;
      res.clash = std::minmax(v.a, v.b);
      return res;
    }
    if (v.a.is_null() && v.b.is_null()) {
      auto [keep, drop] = std::minmax(v.a, v.b);
      redirect(drop, keep);
    } else if (v.a.is_null()) {
      redirect(v.a, v.b);
    } else {
      redirect(v.b, v.a);
    }
  }
}

Tuple ChaseResult::apply(const Tuple& t) const {
  Tuple out;
  out.reserve(t.size());
  for (const auto& v : t) {
    auto it = substitution.find(v);
    out.push_back(it == substitution.end() ? v : it->second);
  }
  return out;
}

namespace {

bool image_ok(const Database& a, const Database& b, const std::map<Value, Value>& m) {
  for (const auto& [name, rel] : a.relations())
    for (const auto& t : rel) {
      Tuple img;
      bool complete = true;
      for (const auto& v : t) {
        if (v.is_null()) {
          auto it = m.find(v);
          if (it == m.end()) {
            complete = false;
            break;
          }
          img.push_back(it->second);
        } else {
          img.push_back(v);
        }
      }
      if (complete && !b.relation(name).contains(img)) return false;
    }
  return true;
}

bool extend(const Database& a, const Database& b, const std::vector<Value>& na,
            const std::vector<Value>& nb, std::size_t i, std::map<Value, Value>& m,
            std::vector<bool>& used) {
  if (i == na.size()) return true;
  for (std::size_t j = 0; j < nb.size(); ++j) {
    if (used[j]) continue;
    m[na[i]] = nb[j];
    used[j] = true;
    if (image_ok(a, b, m) && extend(a, b, na, nb, i + 1, m, used)) return true;
    used[j] = false;
    m.erase(na[i]);
  }
  return false;
}

}  // namespace

bool isomorphic_up_to_nulls(const Database& a, const Database& b) {
  if (a.schema() != b.schema()) return false;
  for (const auto& [name, rel] : a.relations())
    if (rel.size() != b.relation(name).size()) return false;
  if (a.constants() != b.constants()) return false;
  auto sa = a.nulls();
  auto sb = b.nulls();
  if (sa.size() != sb.size()) return false;
  std::vector<Value> na(sa.begin(), sa.end());
  std::vector<Value> nb(sb.begin(), sb.end());
  std::map<Value, Value> m;
  std::vector<bool> used(nb.size(), false);
  return extend(a, b, na, nb, 0, m, used);
}

}  // namespace nullq
