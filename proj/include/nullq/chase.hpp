#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>

#include "nullq/database.hpp"
#include "nullq/egd.hpp"

namespace nullq {

struct ChaseResult {
  /// The chased database; meaningful only when `!failed`.
  Database database;
  bool failed = false;
  /// The two distinct constants the chase was forced to equate.
  std::optional<std::pair<Value, Value>> clash;
  std::size_t steps = 0;
  /// Where each null of the input ended up; nulls never touched map to
  /// themselves.
  std::map<Value, Value> substitution;

  bool ok() const noexcept { return !failed; }
  /// A tuple over the input rewritten into the chased database.
  Tuple apply(const Tuple& t) const;
};

struct ChaseOptions {
  /// When set, violations are repaired in a seeded random order instead of
  /// the canonical first-found order.
  std::optional<std::uint64_t> shuffle_seed;
};

/// Classical EGD chase.  A step repairs one violated EGD by replacing a
/// null with the other value (a constant if there is one, otherwise the
/// canonically smaller null), and fails when two distinct constants must
/// be equated.
ChaseResult chase(const Database& d, const EgdSet& sigma, ChaseOptions options = {});

/// Whether `a` and `b` are equal up to a bijective renaming of nulls.
bool isomorphic_up_to_nulls(const Database& a, const Database& b);

}  // namespace nullq
