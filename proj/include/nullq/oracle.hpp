#pragma once

#include <cstddef>
#include <cstdint>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "nullq/database.hpp"
#include "nullq/egd.hpp"
#include "nullq/formula.hpp"

namespace nullq {

/// Ground truth by exhaustive enumeration.
///
/// FO satisfaction and EGD consistency depend only on the equality type a
/// valuation induces over adom(D) ∪ adom(Q); a valuation is therefore
/// represented by a canonical pattern mapping each null to a known
/// constant or to one of |Null(D)| fresh constants, fresh constants used
/// in first-appearance order.
struct OracleOptions {
  std::size_t null_cap = 6;
  /// Extra fresh constants on top of |Null(D)|.
  std::size_t extra_fresh = 0;
  /// When false, every map into known ∪ fresh is enumerated instead of one
  /// representative per equality type.  Only useful for stability checks.
  bool canonical = true;
};

struct ValuationPattern {
  Valuation valuation;
  bool consistent = true;
};

struct PatternSpace {
  std::vector<std::string> nulls;  // sorted
  std::vector<Value> known;        // Const(D) ∪ adom(Q)
  std::vector<Value> fresh;        // pool, disjoint from `known`
  std::vector<ValuationPattern> patterns;

  std::size_t consistent_count() const;
};

/// `count` integer constants not in `avoid`.
std::vector<Value> fresh_constants(const std::set<Value>& avoid, std::size_t count);

/// All patterns with their consistency flag.  Throws ResourceError when
/// |Null(d)| exceeds the cap.
PatternSpace enumerate_patterns(const Database& d, const Formula& q, const EgdSet& sigma,
                                const OracleOptions& options = {});

/// Fixed-size bit set over the consistent patterns of a PatternSpace.
class PatternSet {
 public:
  PatternSet() = default;
  explicit PatternSet(std::size_t n) : size_(n), words_((n + 63) / 64, 0) {}

  void set(std::size_t i) { words_[i / 64] |= std::uint64_t{1} << (i % 64); }
  bool test(std::size_t i) const { return (words_[i / 64] >> (i % 64)) & 1U; }
  std::size_t size() const noexcept { return size_; }
  std::size_t count() const;
  bool all() const { return count() == size_; }
  bool subset_of(const PatternSet& other) const;
  bool strict_subset_of(const PatternSet& other) const { return subset_of(other) && *this != other; }

  friend bool operator==(const PatternSet&, const PatternSet&) = default;

 private:
  std::size_t size_ = 0;
  std::vector<std::uint64_t> words_;
};

/// Supports of every candidate tuple over (adom(D) ∪ adom(Q))^k.
class SupportTable {
 public:
  SupportTable(const Query& q, const Database& d, const EgdSet& sigma,
               const OracleOptions& options = {});

  const std::vector<Tuple>& candidates() const noexcept { return candidates_; }
  /// Consistent patterns; PatternSet indices refer to this list.
  const std::vector<ValuationPattern>& consistent() const noexcept { return consistent_; }
  const PatternSet& support(std::size_t candidate) const { return supports_.at(candidate); }
  /// Throws Error when `a` has the wrong arity or is not a candidate.
  const PatternSet& support(const Tuple& a) const;

  /// Tuples supported by every consistent pattern (all candidates when
  /// there is none).
  TupleSet certain() const;
  /// Tuples whose support is not strictly included in another's.
  TupleSet best() const;

 private:
  std::vector<Tuple> candidates_;
  std::vector<ValuationPattern> consistent_;
  std::vector<PatternSet> supports_;
};

std::vector<ValuationPattern> support_of(const Query& q, const Database& d, const EgdSet& sigma,
                                         const Tuple& a, const OracleOptions& options = {});
TupleSet certain_oracle(const Query& q, const Database& d, const EgdSet& sigma,
                        const OracleOptions& options = {});
TupleSet best_oracle(const Query& q, const Database& d, const EgdSet& sigma,
                     const OracleOptions& options = {});

enum class AnswerKind : std::uint8_t { Certain, Best };
enum class DecisionVariant : std::uint8_t { Member, Equal, Family };

/// member: a tuple; equal: a tuple set; family: a set of tuple sets.
using DecisionPayload = std::variant<Tuple, TupleSet, std::set<TupleSet>>;

/// Throws Error when the payload shape does not match the variant.
bool decide(AnswerKind kind, DecisionVariant variant, const Query& q, const Database& d,
            const EgdSet& sigma, const DecisionPayload& payload,
            const OracleOptions& options = {});

/// Parse `(1, _n1)`, `{(1), (2)}` or `{{(1)}, {}}`.
DecisionPayload parse_payload(DecisionVariant variant, std::string_view text);

}  // namespace nullq
