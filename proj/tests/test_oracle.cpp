#include <gtest/gtest.h>

#include "nullq/errors.hpp"
#include "nullq/fixtures.hpp"
#include "nullq/oracle.hpp"
#include "nullq/parser.hpp"
#include "testkit/testkit.hpp"

using namespace nullq;
using testkit::db;
using testkit::null;
using testkit::num;
using testkit::tup;
using testkit::tuples;

namespace {

const char* kSharedNullDb = "R(_n1).\nR(1).\nS(_n2, _n2).";
Query shared_null() { return parse_query("exists y (R(y) & S(y, x))"); }

}  // namespace

TEST(Patterns, SingleNullWithQueryConstant) {
  auto space = enumerate_patterns(db("R(_n1)."), parse_formula("R(1)"), {});
  EXPECT_EQ(space.nulls, (std::vector<std::string>{"n1"}));
  EXPECT_EQ(space.known, (std::vector<Value>{num(1)}));
  ASSERT_EQ(space.patterns.size(), 2U);
  std::set<Value> images;
  for (const auto& p : space.patterns) images.insert(*p.valuation.image("n1"));
  EXPECT_TRUE(images.contains(num(1)));
  EXPECT_EQ(images.size(), 2U);
}

TEST(Patterns, SharedNullInstance) {
  auto space = enumerate_patterns(db(kSharedNullDb), shared_null().formula, {});
  EXPECT_EQ(space.patterns.size(), 5U);
  EXPECT_EQ(space.consistent_count(), 5U);
  OracleOptions all;
  all.canonical = false;
  EXPECT_EQ(enumerate_patterns(db(kSharedNullDb), shared_null().formula, {}, all).patterns.size(), 9U);
}

TEST(Patterns, ClashLeavesNothingConsistent) {
  auto sigma = parse_constraints("R(x, y) & R(x, z) -> y = z .");
  auto space = enumerate_patterns(db("R(1, 2). R(1, 3). R(_a, 1)."), Formula::truth(), sigma);
  EXPECT_GT(space.patterns.size(), 0U);
  EXPECT_EQ(space.consistent_count(), 0U);
  auto q = parse_query("exists y (R(x, y))");
  auto d = db("R(1, 2). R(1, 3).");
  EXPECT_EQ(certain_oracle(q, d, sigma), testkit::all_candidates(q, d));
  EXPECT_EQ(best_oracle(q, d, sigma), testkit::all_candidates(q, d));
}

TEST(Patterns, Cap) {
  auto d = db("R(_a, _b). R(_c, _d). R(_e, _f). S(_g).");
  EXPECT_THROW(enumerate_patterns(d, Formula::truth(), {}), ResourceError);
  OracleOptions o;
  o.null_cap = 7;
  EXPECT_NO_THROW(enumerate_patterns(d, Formula::truth(), {}, o));
  try {
    enumerate_patterns(d, Formula::truth(), {});
  } catch (const ResourceError& e) {
    EXPECT_EQ(e.cap(), 6U);
  }
}

TEST(Patterns, FreshConstants) {
  auto f = fresh_constants({num(1), num(2), num(4)}, 3);
  for (const auto& v : f) {
    EXPECT_TRUE(v.is_int());
    EXPECT_NE(v, num(1));
    EXPECT_NE(v, num(2));
    EXPECT_NE(v, num(4));
  }
  EXPECT_EQ(std::set<Value>(f.begin(), f.end()).size(), 3U);
}

TEST(Supports, SharedNullInstance) {
  auto q = shared_null();
  auto d = db(kSharedNullDb);
  SupportTable t(q, d, {});
  EXPECT_EQ(t.consistent().size(), 5U);
  EXPECT_EQ(t.support(tup("(_n2)")).count(), 3U);
  EXPECT_EQ(t.support(tup("(1)")).count(), 2U);
  EXPECT_TRUE(t.support(tup("(1)")).strict_subset_of(t.support(tup("(_n2)"))));
  EXPECT_EQ(support_of(q, d, {}, tup("(1)")).size(), 2U);
  for (const auto& p : support_of(q, d, {}, tup("(1)"))) EXPECT_EQ(p.valuation.image("n2"), num(1));
  EXPECT_EQ(t.certain(), TupleSet{});
  EXPECT_EQ(t.best(), tuples("{(_n2)}"));
  EXPECT_THROW(t.support(tup("(7)")), Error);
  EXPECT_THROW(t.support(tup("(1, 1)")), Error);
}

TEST(Supports, MatchReferenceSemantics) {
  auto dbs = testkit::corpus(70, 61);
  auto egds = fixtures::egd_pools();
  std::vector<Query> pool = fixtures::bccq_pool();
  for (const auto& q : fixtures::best_pool()) pool.push_back(q);
  pool.push_back(parse_query("forall y (R(x, y) -> S(y))"));
  for (std::size_t i = 0; i < dbs.size(); ++i) {
    const auto& sigma = egds[i % egds.size()];
    for (const auto& q : pool) {
      auto ref = testkit::ref_semantics(q, dbs[i], sigma);
      EXPECT_EQ(certain_oracle(q, dbs[i], sigma), ref.certain()) << q.formula.to_string() << "\n"
                                                                 << dbs[i].to_text();
      EXPECT_EQ(best_oracle(q, dbs[i], sigma), ref.best()) << q.formula.to_string() << "\n"
                                                           << dbs[i].to_text();
    }
  }
}

TEST(Supports, CanonicalPatternsSuffice) {
  auto dbs = testkit::corpus(40, 62);
  OracleOptions wide;
  wide.canonical = false;
  wide.extra_fresh = 1;
  for (const auto& q : fixtures::bccq_pool())
    for (const auto& d : dbs) {
      SupportTable a(q, d, {});
      SupportTable b(q, d, {}, wide);
      EXPECT_EQ(a.certain(), b.certain());
      EXPECT_EQ(a.best(), b.best());
    }
}

TEST(Supports, DominanceIsAStrictOrder) {
  auto dbs = testkit::corpus(30, 63);
  for (const auto& q : fixtures::best_pool())
    for (const auto& d : dbs) {
      SupportTable t(q, d, {});
      auto n = t.candidates().size();
      for (std::size_t i = 0; i < n; ++i) {
        EXPECT_FALSE(t.support(i).strict_subset_of(t.support(i)));
        for (std::size_t j = 0; j < n; ++j)
          for (std::size_t k = 0; k < n; ++k)
            if (t.support(i).strict_subset_of(t.support(j)) && t.support(j).strict_subset_of(t.support(k)))
              EXPECT_TRUE(t.support(i).strict_subset_of(t.support(k)));
      }
      EXPECT_FALSE(t.best().empty());
    }
}

TEST(Decide, Variants) {
  auto q = shared_null();
  auto d = db(kSharedNullDb);
  auto dec = [&](AnswerKind k, DecisionVariant v, const char* payload) {
    return decide(k, v, q, d, {}, parse_payload(v, payload));
  };
  EXPECT_TRUE(dec(AnswerKind::Certain, DecisionVariant::Equal, "{}"));
  EXPECT_FALSE(dec(AnswerKind::Certain, DecisionVariant::Equal, "{(_n2)}"));
  EXPECT_TRUE(dec(AnswerKind::Best, DecisionVariant::Member, "(_n2)"));
  EXPECT_FALSE(dec(AnswerKind::Best, DecisionVariant::Member, "(1)"));
  EXPECT_FALSE(dec(AnswerKind::Certain, DecisionVariant::Member, "(_n2)"));
  EXPECT_TRUE(dec(AnswerKind::Best, DecisionVariant::Equal, "{(_n2)}"));
  EXPECT_FALSE(dec(AnswerKind::Certain, DecisionVariant::Family, "{{(1)}, {(_n2)}}"));
  EXPECT_TRUE(dec(AnswerKind::Certain, DecisionVariant::Family, "{{(1)}, {}}"));
  EXPECT_TRUE(dec(AnswerKind::Best, DecisionVariant::Family, "{{(_n2)}}"));
  EXPECT_THROW(decide(AnswerKind::Best, DecisionVariant::Member, q, d, {}, TupleSet{}), Error);
}

TEST(Decide, PayloadParsing) {
  EXPECT_EQ(std::get<Tuple>(parse_payload(DecisionVariant::Member, "(1, _n1)")), (Tuple{num(1), null("n1")}));
  EXPECT_EQ(std::get<Tuple>(parse_payload(DecisionVariant::Member, "()")), Tuple{});
  EXPECT_EQ(std::get<TupleSet>(parse_payload(DecisionVariant::Equal, "{(1), (2)}")).size(), 2U);
  EXPECT_EQ(std::get<TupleSet>(parse_payload(DecisionVariant::Equal, "{}")).size(), 0U);
  auto fam = std::get<std::set<TupleSet>>(parse_payload(DecisionVariant::Family, "{{(1)}, {}}"));
  EXPECT_EQ(fam.size(), 2U);
  EXPECT_TRUE(fam.contains(TupleSet{}));
  EXPECT_THROW(parse_payload(DecisionVariant::Member, "{(1)}"), SyntaxError);
  EXPECT_THROW(parse_payload(DecisionVariant::Equal, "{(1)"), SyntaxError);
  auto mixed = parse_payload(DecisionVariant::Equal, "{(1), (1, 2)}");
  EXPECT_THROW(decide(AnswerKind::Certain, DecisionVariant::Equal, shared_null(), db(kSharedNullDb), {}, mixed), Error);
}
