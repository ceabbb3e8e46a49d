#include <gtest/gtest.h>

#include "nullq/best.hpp"
#include "nullq/errors.hpp"
#include "nullq/eval.hpp"
#include "nullq/fixtures.hpp"
#include "nullq/oracle.hpp"
#include "nullq/parser.hpp"
#include "testkit/testkit.hpp"

using namespace nullq;
using testkit::db;
using testkit::null;
using testkit::num;

namespace {

bool included(const SupportInclusion& s, const Database& d, const Tuple& a, const Tuple& b) {
  std::map<std::string, Value> env;
  for (std::size_t i = 0; i < a.size(); ++i) {
    env[s.left[i]] = a[i];
    env[s.right[i]] = b[i];
  }
  return Evaluator(d).satisfies(s.formula, env);
}

const char* kSharedNullDb = "R(_n1).\nR(1).\nS(_n2, _n2).";

}  // namespace

TEST(SupportInclusion, SharedNullInstance) {
  auto q = parse_query("exists y (R(y) & S(y, x))");
  auto d = db(kSharedNullDb);
  auto s = build_support_inclusion(q);
  EXPECT_TRUE(included(s, d, {num(1)}, {null("n2")}));
  EXPECT_TRUE(included(s, d, {null("n1")}, {null("n2")}));
  EXPECT_FALSE(included(s, d, {null("n2")}, {num(1)}));
  EXPECT_FALSE(included(s, d, {null("n2")}, {null("n1")}));
  EXPECT_FALSE(included(s, d, {num(1)}, {null("n1")}));
  EXPECT_FALSE(included(s, d, {null("n1")}, {num(1)}));
  EXPECT_EQ(evaluate_best(q, d), (TupleSet{{null("n2")}}));
}

TEST(SupportInclusion, Reflexive) {
  auto dbs = testkit::corpus(30, 51);
  for (const auto& q : fixtures::best_pool()) {
    auto s = build_support_inclusion(q);
    for (const auto& d : dbs)
      for (const auto& a : testkit::all_candidates(q, d)) EXPECT_TRUE(included(s, d, a, a));
  }
}

TEST(SupportInclusion, EqualSupports) {
  auto q = parse_query("R(x)");
  auto d = db("R(1). R(_n).");
  auto s = build_support_inclusion(q);
  EXPECT_TRUE(included(s, d, {num(1)}, {null("n")}));
  EXPECT_TRUE(included(s, d, {null("n")}, {num(1)}));
  EXPECT_EQ(evaluate_best(q, d), (TupleSet{{num(1)}, {null("n")}}));
  EXPECT_EQ(evaluate_best(q, db("R(1).")), (TupleSet{{num(1)}}));
}

TEST(SupportInclusion, MatchesOracle) {
  auto dbs = testkit::corpus(40, 52);
  std::size_t strict = 0;
  for (const auto& q : fixtures::best_pool()) {
    auto s = build_support_inclusion(q);
    for (const auto& d : dbs) {
      SupportTable t(q, d, {});
      for (std::size_t i = 0; i < t.candidates().size(); ++i)
        for (std::size_t j = 0; j < t.candidates().size(); ++j) {
          bool expected = t.support(i).subset_of(t.support(j));
          if (expected && !t.support(j).subset_of(t.support(i))) ++strict;
          EXPECT_EQ(included(s, d, t.candidates()[i], t.candidates()[j]), expected)
              << q.formula.to_string() << "\n" << d.to_text();
        }
    }
  }
  EXPECT_GT(strict, 50U);
}

TEST(Best, MatchesReferenceSemantics) {
  auto dbs = testkit::corpus(60, 53);
  for (const auto& q : fixtures::best_pool()) {
    auto rewritten = Query::from(rewrite_best(q), q.answer_vars);
    for (const auto& d : dbs) {
      auto expected = testkit::ref_semantics(q, d, {}).best();
      EXPECT_EQ(evaluate_best(q, d), expected) << q.formula.to_string() << "\n" << d.to_text();
      EXPECT_EQ(eval_fo(rewritten, d), expected);
    }
  }
}

TEST(Best, RelationToCertainAnswers) {
  auto dbs = testkit::corpus(60, 54);
  for (const auto& q : fixtures::best_pool())
    for (const auto& d : dbs) {
      auto best = evaluate_best(q, d);
      auto cert = certain_oracle(q, d, {});
      EXPECT_FALSE(best.empty());
      EXPECT_TRUE(std::includes(best.begin(), best.end(), cert.begin(), cert.end()));
      if (!cert.empty()) EXPECT_EQ(best, cert) << q.formula.to_string() << "\n" << d.to_text();
    }
}

TEST(Best, BooleanQuery) {
  auto q = parse_query("exists x (R(x, x))");
  EXPECT_EQ(evaluate_best(q, db("R(1, _n).")), TupleSet{Tuple{}});
  EXPECT_EQ(evaluate_best(q, db("S(1).")), TupleSet{Tuple{}});
}

TEST(Best, Errors) {
  EXPECT_THROW(build_support_inclusion(parse_query("S(x) - R(x, x)")), ClassificationError);
  EXPECT_THROW(evaluate_best(parse_query("!S(x)"), db("S(1).")), ClassificationError);
  BestOptions o;
  o.sigma = parse_constraints("R(x, y) & R(x, z) -> y = z .");
  EXPECT_THROW(evaluate_best(parse_query("S(x)"), db("S(1)."), o), UnsupportedError);
}

TEST(Best, ExperimentalConstraintModeWithoutConstraints) {
  auto dbs = testkit::corpus(25, 55);
  BestOptions o;
  o.experimental_egds = true;
  for (const auto& q : fixtures::best_pool())
    for (const auto& d : dbs) EXPECT_EQ(evaluate_best(q, d, o), evaluate_best(q, d));
}

TEST(Best, ExperimentalConstraintModeAgreement) {
  auto dbs = testkit::corpus(30, 56);
  auto pools = fixtures::egd_pools();
  std::size_t cases = 0;
  std::size_t agree = 0;
  for (std::size_t s = 1; s < pools.size(); ++s) {
    BestOptions o;
    o.experimental_egds = true;
    o.sigma = pools[s];
    for (const auto& q : fixtures::best_pool())
      for (const auto& d : dbs) {
        ++cases;
        if (evaluate_best(q, d, o) == best_oracle(q, d, pools[s])) ++agree;
      }
  }
  RecordProperty("agreement", std::to_string(agree) + "/" + std::to_string(cases));
  std::printf("experimental constraint mode agrees on %zu of %zu cases\n", agree, cases);
  EXPECT_GT(cases, 0U);
}
