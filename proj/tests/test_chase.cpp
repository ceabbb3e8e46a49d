#include <gtest/gtest.h>

#include "nullq/chase.hpp"
#include "nullq/errors.hpp"
#include "nullq/fixtures.hpp"
#include "nullq/oracle.hpp"
#include "testkit/testkit.hpp"

using namespace nullq;
using testkit::db;
using testkit::null;
using testkit::num;

namespace {

EgdSet key() { return parse_constraints("R(x, y) & R(x, z) -> y = z ."); }

}  // namespace

TEST(Chase, ReplacesNullByConstant) {
  auto r = chase(db("R(1, _n1). R(1, 2). S(_n1)."), key());
  ASSERT_TRUE(r.ok());
  EXPECT_EQ(r.database, db("R(1, 2). S(2)."));
  EXPECT_EQ(r.substitution.at(null("n1")), num(2));
  EXPECT_EQ(r.apply({null("n1"), num(3)}), (Tuple{num(2), num(3)}));
}

TEST(Chase, ForcedByEveryConsistentValuation) {
  auto d = db("R(1, _n1). R(1, 2). S(_n1).");
  auto space = enumerate_patterns(d, Formula::truth(), key());
  ASSERT_GT(space.consistent_count(), 0U);
  for (const auto& p : space.patterns)
    if (p.consistent) EXPECT_EQ(p.valuation.image("n1"), num(2));
}

TEST(Chase, FailsOnConstantClash) {
  auto r = chase(db("R(1, 2). R(1, 3)."), key());
  EXPECT_TRUE(r.failed);
  EXPECT_EQ(r.clash, (std::pair{num(2), num(3)}));
}

TEST(Chase, NoConstraints) {
  auto d = db("R(1, _a). R(1, _b).");
  auto r = chase(d, {});
  EXPECT_TRUE(r.ok());
  EXPECT_EQ(r.database, d);
  EXPECT_EQ(r.steps, 0U);
}

TEST(Chase, KeepsSmallerNull) {
  auto r = chase(db("R(1, _b). R(1, _a). S(_b)."), key());
  ASSERT_TRUE(r.ok());
  EXPECT_EQ(r.database, db("R(1, _a). S(_a)."));
}

TEST(Chase, CascadingMerges) {
  auto r = chase(db("R(_x, _y). R(_x, 1). R(_y, _z). R(1, 4)."), key());
  ASSERT_TRUE(r.ok());
  EXPECT_EQ(r.database, db("R(_x, 1). R(1, 4)."));
  EXPECT_EQ(r.substitution.at(null("z")), num(4));
}

TEST(Chase, UnknownRelation) {
  EXPECT_THROW(chase(db("S(1)."), key()), SchemaError);
}

TEST(Chase, ConfluentUpToNullRenaming) {
  auto dbs = testkit::corpus(120, 31);
  auto pools = fixtures::egd_pools();
  std::size_t nontrivial = 0;
  for (std::size_t i = 0; i < dbs.size(); ++i) {
    const auto& sigma = pools[1 + i % 3];
    auto a = chase(dbs[i], sigma);
    if (a.steps > 0) ++nontrivial;
    for (std::uint64_t seed = 1; seed <= 3; ++seed) {
      auto b = chase(dbs[i], sigma, {seed});
      ASSERT_EQ(a.failed, b.failed) << dbs[i].to_text();
      if (a.ok()) EXPECT_TRUE(isomorphic_up_to_nulls(a.database, b.database)) << dbs[i].to_text();
    }
  }
  EXPECT_GT(nontrivial, 20U);
}

TEST(Chase, Idempotent) {
  auto dbs = testkit::corpus(120, 32);
  auto pools = fixtures::egd_pools();
  for (std::size_t i = 0; i < dbs.size(); ++i) {
    const auto& sigma = pools[1 + i % 3];
    auto a = chase(dbs[i], sigma);
    if (!a.ok()) continue;
    auto b = chase(a.database, sigma);
    ASSERT_TRUE(b.ok());
    EXPECT_EQ(b.steps, 0U);
    EXPECT_EQ(b.database, a.database);
    EXPECT_TRUE(satisfies_egds(a.database, sigma));
  }
}

TEST(Chase, Isomorphism) {
  EXPECT_TRUE(isomorphic_up_to_nulls(db("R(_a, _b). R(_b, 1)."), db("R(_q, _p). R(_p, 1).")));
  EXPECT_FALSE(isomorphic_up_to_nulls(db("R(_a, _b). R(_b, 1)."), db("R(_q, _p). R(_q, 1).")));
  EXPECT_FALSE(isomorphic_up_to_nulls(db("R(_a, _a)."), db("R(_a, _b).")));
}

TEST(Chase, FailureMeansNoConsistentValuation) {
  auto dbs = testkit::corpus(150, 33);
  auto pools = fixtures::egd_pools();
  for (std::size_t i = 0; i < dbs.size(); ++i) {
    const auto& sigma = pools[1 + i % 3];
    auto space = enumerate_patterns(dbs[i], Formula::truth(), sigma);
    EXPECT_EQ(chase(dbs[i], sigma).failed, space.consistent_count() == 0) << dbs[i].to_text();
  }
}
