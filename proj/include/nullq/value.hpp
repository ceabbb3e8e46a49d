#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace nullq {

/// A database value: an integer constant, a string constant, or a marked
/// null.  Two nulls are the same value iff they carry the same name.
///
/// The ordering is total: integers, then strings, then nulls; integers
/// compare numerically, strings and null names lexicographically.
class Value {
 public:
  enum class Kind : std::uint8_t { Int = 0, Str = 1, Null = 2 };

  Value() = default;

  static Value integer(std::int64_t v) { return Value(Kind::Int, v, {}); }
  static Value string(std::string s) { return Value(Kind::Str, 0, std::move(s)); }
  static Value null(std::string name) { return Value(Kind::Null, 0, std::move(name)); }

  Kind kind() const noexcept { return kind_; }
  bool is_null() const noexcept { return kind_ == Kind::Null; }
  bool is_constant() const noexcept { return kind_ != Kind::Null; }
  bool is_int() const noexcept { return kind_ == Kind::Int; }

  std::int64_t as_int() const noexcept { return int_; }
  /// String payload for string constants, the name for nulls.
  const std::string& text() const noexcept { return text_; }

  friend bool operator==(const Value& a, const Value& b) noexcept {
    return a.kind_ == b.kind_ && a.int_ == b.int_ && a.text_ == b.text_;
  }
  friend std::strong_ordering operator<=>(const Value& a, const Value& b) noexcept {
    if (auto c = a.kind_ <=> b.kind_; c != 0) return c;
    if (auto c = a.int_ <=> b.int_; c != 0) return c;
    return a.text_.compare(b.text_) <=> 0;
  }

  /// `1`, `"a"` (with escapes) or `_name`.
  std::string to_string() const;

 private:
  Value(Kind k, std::int64_t i, std::string s) : kind_(k), int_(i), text_(std::move(s)) {}

  Kind kind_ = Kind::Int;
  std::int64_t int_ = 0;
  std::string text_;
};

using Tuple = std::vector<Value>;
using TupleSet = std::set<Tuple>;

struct ValueHash {
  std::size_t operator()(const Value& v) const noexcept {
    std::size_t h = std::hash<std::string>{}(v.text());
    return h ^ (std::hash<std::int64_t>{}(v.as_int()) * 31 + static_cast<std::size_t>(v.kind()));
  }
};

/// `1, _n1` is the CLI's tuple rendering.  The empty tuple renders as "".
std::string to_string(const Tuple& t);

/// Quote a string constant the way the text formats expect.
std::string quote(std::string_view s);

}  // namespace nullq
