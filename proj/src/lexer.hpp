#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "nullq/value.hpp"

namespace nullq::detail {

enum class Tok : std::uint8_t {
  Ident,
  Int,
  Str,
  Null,
  LParen,
  RParen,
  LBrace,
  RBrace,
  Comma,
  Dot,
  Amp,
  Bar,
  Bang,
  Minus,
  Arrow,
  Eq,
  ColonDash,
  End,
};

struct Token {
  Tok kind = Tok::End;
  std::string text;
  std::int64_t number = 0;
  std::size_t line = 1;
  std::size_t column = 1;
};

const char* describe(Tok t);

/// Split `text` into tokens; `#` runs to end of line.  Nulls (`_name`)
/// are only produced when `allow_nulls` is set.
std::vector<Token> tokenize(std::string_view text, bool allow_nulls);

class TokenStream {
 public:
  explicit TokenStream(std::vector<Token> toks) : toks_(std::move(toks)) {}

  const Token& peek(std::size_t ahead = 0) const {
    std::size_t i = pos_ + ahead;
    return i < toks_.size() ? toks_[i] : toks_.back();
  }
  bool at(Tok k) const { return peek().kind == k; }
  bool at_ident(std::string_view word) const {
    return peek().kind == Tok::Ident && peek().text == word;
  }
  Token next() {
    Token t = peek();
    if (pos_ + 1 < toks_.size()) ++pos_;
    return t;
  }
  bool accept(Tok k) {
    if (!at(k)) return false;
    next();
    return true;
  }
  Token expect(Tok k, const char* context = nullptr);
  [[noreturn]] void fail(const std::string& what) const;

 private:
  std::vector<Token> toks_;
  std::size_t pos_ = 0;
};

/// Int, string or null literal at the current position.
bool at_value(const TokenStream& ts);
Value parse_value(TokenStream& ts);
/// `(v1, ..., vk)`; `()` is the empty tuple.
Tuple parse_tuple(TokenStream& ts);

}  // namespace nullq::detail
