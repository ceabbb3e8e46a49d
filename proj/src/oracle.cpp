#include "nullq/oracle.hpp"

#include <algorithm>
#include <bit>

#include "lexer.hpp"
#include "nullq/errors.hpp"
#include "nullq/eval.hpp"

namespace nullq {

std::size_t PatternSpace::consistent_count() const {
  return static_cast<std::size_t>(
      std::count_if(patterns.begin(), patterns.end(), [](const auto& p) { return p.consistent; }));
}

std::vector<Value> fresh_constants(const std::set<Value>& avoid, std::size_t count) {
  std::vector<Value> out;
  for (std::int64_t i = 1; out.size() < count; ++i) {
    Value v = Value::integer(i);
    if (!avoid.contains(v)) out.push_back(v);
  }
  return out;
}

PatternSpace enumerate_patterns(const Database& d, const Formula& q, const EgdSet& sigma,
                                const OracleOptions& options) {
  PatternSpace space;
  for (const auto& n : d.nulls()) space.nulls.push_back(n.text());
  if (space.nulls.size() > options.null_cap)
    throw ResourceError("database has " + std::to_string(space.nulls.size()) +
                            " nulls, more than the oracle cap of " +
                            std::to_string(options.null_cap),
                        options.null_cap);
  std::set<Value> known = d.constants();
  auto qc = q.constants();
  known.insert(qc.begin(), qc.end());
  space.known.assign(known.begin(), known.end());
  space.fresh = fresh_constants(known, space.nulls.size() + options.extra_fresh);

  const std::size_t n = space.nulls.size();
  const std::size_t k = space.known.size();
  std::vector<std::size_t> choice(n, 0);  // < k: known, else fresh index k + j
  auto emit = [&] {
    Valuation v;
    for (std::size_t i = 0; i < n; ++i)
      v.assign(space.nulls[i], choice[i] < k ? space.known[choice[i]] : space.fresh[choice[i] - k]);
    ValuationPattern p{v, true};
    if (!sigma.empty()) p.consistent = satisfies_egds(apply_valuation(v, d), sigma);
    space.patterns.push_back(std::move(p));
  };
  std::function<void(std::size_t, std::size_t)> rec = [&](std::size_t i, std::size_t fresh_used) {
    if (i == n) {
      emit();
      return;
    }
    std::size_t limit = options.canonical ? std::min(fresh_used + 1, space.fresh.size())
                                          : space.fresh.size();
    for (std::size_t c = 0; c < k + limit; ++c) {
      choice[i] = c;
      std::size_t used = fresh_used;
      if (c >= k) used = std::max(used, c - k + 1);
      rec(i + 1, used);
    }
  };
  rec(0, 0);
  return space;
}

std::size_t PatternSet::count() const {
  std::size_t n = 0;
  for (auto w : words_) n += static_cast<std::size_t>(std::popcount(w));
  return n;
}

bool PatternSet::subset_of(const PatternSet& other) const {
  for (std::size_t i = 0; i < words_.size(); ++i)
    if ((words_[i] & ~other.words_[i]) != 0) return false;
  return true;
}

SupportTable::SupportTable(const Query& q, const Database& d, const EgdSet& sigma,
                           const OracleOptions& options) {
  check_schema(q.formula.relations(), d);
  PatternSpace space = enumerate_patterns(d, q.formula, sigma, options);
  for (auto& p : space.patterns)
    if (p.consistent) consistent_.push_back(std::move(p));

  std::set<Value> dom = d.active_domain();
  auto qc = q.formula.constants();
  dom.insert(qc.begin(), qc.end());
  std::vector<Value> values(dom.begin(), dom.end());
  const std::size_t k = q.answer_vars.size();
  std::vector<std::size_t> idx(k, 0);
  bool more = k == 0 || !values.empty();
  while (more) {
    Tuple t;
    for (std::size_t i = 0; i < k; ++i) t.push_back(values[idx[i]]);
    candidates_.push_back(std::move(t));
    more = false;
    for (std::size_t i = k; i-- > 0;) {
      if (++idx[i] < values.size()) {
        more = true;
        break;
      }
      idx[i] = 0;
    }
  }

  supports_.assign(candidates_.size(), PatternSet(consistent_.size()));
  for (std::size_t p = 0; p < consistent_.size(); ++p) {
    const Valuation& v = consistent_[p].valuation;
    TupleSet answers = eval_fo(q, apply_valuation(v, d));
    for (std::size_t c = 0; c < candidates_.size(); ++c)
      if (answers.contains(v.apply(candidates_[c]))) supports_[c].set(p);
  }
}

const PatternSet& SupportTable::support(const Tuple& a) const {
  if (!candidates_.empty() && a.size() != candidates_.front().size())
    throw Error("tuple has arity " + std::to_string(a.size()) + ", the query has arity " +
                std::to_string(candidates_.front().size()));
  auto it = std::lower_bound(candidates_.begin(), candidates_.end(), a);
  if (it == candidates_.end() || *it != a)
    throw Error("(" + to_string(a) + ") is not a candidate answer");
  return supports_[static_cast<std::size_t>(it - candidates_.begin())];
}

TupleSet SupportTable::certain() const {
  TupleSet out;
  for (std::size_t c = 0; c < candidates_.size(); ++c)
    if (supports_[c].all()) out.insert(candidates_[c]);
  return out;
}

TupleSet SupportTable::best() const {
  TupleSet out;
  for (std::size_t c = 0; c < candidates_.size(); ++c) {
    bool dominated = false;
    for (std::size_t o = 0; o < candidates_.size() && !dominated; ++o)
      dominated = o != c && supports_[c].strict_subset_of(supports_[o]);
    if (!dominated) out.insert(candidates_[c]);
  }
  return out;
}

std::vector<ValuationPattern> support_of(const Query& q, const Database& d, const EgdSet& sigma,
                                         const Tuple& a, const OracleOptions& options) {
  SupportTable table(q, d, sigma, options);
  const PatternSet& s = table.support(a);
  std::vector<ValuationPattern> out;
  for (std::size_t i = 0; i < s.size(); ++i)
    if (s.test(i)) out.push_back(table.consistent()[i]);
  return out;
}

TupleSet certain_oracle(const Query& q, const Database& d, const EgdSet& sigma,
                        const OracleOptions& options) {
  return SupportTable(q, d, sigma, options).certain();
}

TupleSet best_oracle(const Query& q, const Database& d, const EgdSet& sigma,
                     const OracleOptions& options) {
  return SupportTable(q, d, sigma, options).best();
}

bool decide(AnswerKind kind, DecisionVariant variant, const Query& q, const Database& d,
            const EgdSet& sigma, const DecisionPayload& payload, const OracleOptions& options) {
  auto check = [&](const Tuple& t) {
    if (t.size() != q.answer_vars.size())
      throw Error("tuple has arity " + std::to_string(t.size()) + ", the query has arity " +
                  std::to_string(q.answer_vars.size()));
  };
  SupportTable table(q, d, sigma, options);
  TupleSet answers = kind == AnswerKind::Certain ? table.certain() : table.best();
  switch (variant) {
    case DecisionVariant::Member: {
      const auto* t = std::get_if<Tuple>(&payload);
      if (!t) throw Error("member expects a tuple");
      check(*t);
      return answers.contains(*t);
    }
    case DecisionVariant::Equal: {
      const auto* s = std::get_if<TupleSet>(&payload);
      if (!s) throw Error("equal expects a set of tuples");
      for (const auto& t : *s) check(t);
      return answers == *s;
    }
    case DecisionVariant::Family: {
      const auto* f = std::get_if<std::set<TupleSet>>(&payload);
      if (!f) throw Error("family expects a set of tuple sets");
      for (const auto& s : *f)
        for (const auto& t : s) check(t);
      return f->contains(answers);
    }
  }
  return false;
}

namespace {

using detail::Tok;
using detail::TokenStream;

TupleSet parse_set(TokenStream& ts) {
  TupleSet out;
  ts.expect(Tok::LBrace);
  if (ts.accept(Tok::RBrace)) return out;
  do {
    out.insert(detail::parse_tuple(ts));
  } while (ts.accept(Tok::Comma));
  ts.expect(Tok::RBrace);
  return out;
}

}  // namespace

DecisionPayload parse_payload(DecisionVariant variant, std::string_view text) {
  TokenStream ts(detail::tokenize(text, true));
  DecisionPayload out;
  switch (variant) {
    case DecisionVariant::Member: {
      Tuple t;
      if (ts.at(Tok::LParen)) {
        t = detail::parse_tuple(ts);
      } else if (!ts.at(Tok::End)) {
        do {
          t.push_back(detail::parse_value(ts));
        } while (ts.accept(Tok::Comma));
      }
      out = std::move(t);
      break;
    }
    case DecisionVariant::Equal: out = parse_set(ts); break;
    case DecisionVariant::Family: {
      std::set<TupleSet> f;
      ts.expect(Tok::LBrace);
      if (!ts.accept(Tok::RBrace)) {
        do {
          f.insert(parse_set(ts));
        } while (ts.accept(Tok::Comma));
        ts.expect(Tok::RBrace);
      }
      out = std::move(f);
      break;
    }
  }
  if (!ts.at(Tok::End)) ts.fail("unexpected '" + ts.peek().text + "' in payload");
  return out;
}

}  // namespace nullq
