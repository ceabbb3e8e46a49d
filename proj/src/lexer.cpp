#include "lexer.hpp"

#include <cctype>
#include <charconv>

#include "nullq/errors.hpp"

namespace nullq::detail {

const char* describe(Tok t) {
  switch (t) {
    case Tok::Ident: return "identifier";
    case Tok::Int: return "integer";
    case Tok::Str: return "string";
    case Tok::Null: return "null";
    case Tok::LParen: return "'('";
    case Tok::RParen: return "')'";
    case Tok::LBrace: return "'{'";
    case Tok::RBrace: return "'}'";
    case Tok::Comma: return "','";
    case Tok::Dot: return "'.'";
    case Tok::Amp: return "'&'";
    case Tok::Bar: return "'|'";
    case Tok::Bang: return "'!'";
    case Tok::Minus: return "'-'";
    case Tok::Arrow: return "'->'";
    case Tok::Eq: return "'='";
    case Tok::ColonDash: return "':-'";
    case Tok::End: return "end of input";
  }
  return "?";
}

namespace {

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) != 0; }
bool ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) != 0 || c == '_';
}

bool negative_allowed(const std::vector<Token>& out) {
  if (out.empty()) return true;
  switch (out.back().kind) {
    case Tok::Ident:
    case Tok::Int:
    case Tok::Str:
    case Tok::Null:
    case Tok::RParen:
    case Tok::RBrace:
      return false;
    default:
      return true;
  }
}

}  // namespace

std::vector<Token> tokenize(std::string_view text, bool allow_nulls) {
  std::vector<Token> out;
  std::size_t line = 1;
  std::size_t col = 1;
  std::size_t i = 0;
  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n; ++k) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
      ++i;
    }
  };
  auto push = [&](Tok k, std::string s, std::size_t l, std::size_t c) {
    Token t;
    t.kind = k;
    t.text = std::move(s);
    t.line = l;
    t.column = c;
    out.push_back(std::move(t));
  };

  while (i < text.size()) {
    char c = text[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance(1);
      continue;
    }
    if (c == '#') {
      while (i < text.size() && text[i] != '\n') advance(1);
      continue;
    }
    std::size_t l = line;
    std::size_t cc = col;
    bool digit = std::isdigit(static_cast<unsigned char>(c)) != 0;
    bool neg = c == '-' && i + 1 < text.size() &&
               std::isdigit(static_cast<unsigned char>(text[i + 1])) && negative_allowed(out);
    if (digit || neg) {
      std::size_t j = i + 1;
      while (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j]))) ++j;
      std::string lit(text.substr(i, j - i));
      std::int64_t v = 0;
      auto res = std::from_chars(lit.data(), lit.data() + lit.size(), v);
      if (res.ec != std::errc{}) throw SyntaxError("integer out of range: " + lit, l, cc);
      push(Tok::Int, lit, l, cc);
      out.back().number = v;
      advance(j - i);
      continue;
    }
    if (ident_start(c)) {
      std::size_t j = i;
      while (j < text.size() && ident_char(text[j])) ++j;
      push(Tok::Ident, std::string(text.substr(i, j - i)), l, cc);
      advance(j - i);
      continue;
    }
    if (c == '_') {
      std::size_t j = i + 1;
      while (j < text.size() && ident_char(text[j])) ++j;
      if (j == i + 1) throw SyntaxError("empty null name", l, cc);
      if (!allow_nulls) throw SyntaxError("nulls are not allowed here", l, cc);
      push(Tok::Null, std::string(text.substr(i + 1, j - i - 1)), l, cc);
      advance(j - i);
      continue;
    }
    if (c == '"') {
      std::string s;
      advance(1);
      bool closed = false;
      while (i < text.size()) {
        char d = text[i];
        if (d == '"') {
          advance(1);
          closed = true;
          break;
        }
        if (d == '\\' && i + 1 < text.size()) {
          char e = text[i + 1];
          s += e == 'n' ? '\n' : e;
          advance(2);
          continue;
        }
        s += d;
        advance(1);
      }
      if (!closed) throw SyntaxError("unterminated string", l, cc);
      push(Tok::Str, std::move(s), l, cc);
      continue;
    }
    auto two = text.substr(i, 2);
    if (two == "->") {
      push(Tok::Arrow, "->", l, cc);
      advance(2);
      continue;
    }
    if (two == ":-") {
      push(Tok::ColonDash, ":-", l, cc);
      advance(2);
      continue;
    }
    Tok k;
    switch (c) {
      case '(': k = Tok::LParen; break;
      case ')': k = Tok::RParen; break;
      case '{': k = Tok::LBrace; break;
      case '}': k = Tok::RBrace; break;
      case ',': k = Tok::Comma; break;
      case '.': k = Tok::Dot; break;
      case '&': k = Tok::Amp; break;
      case '|': k = Tok::Bar; break;
      case '!': k = Tok::Bang; break;
      case '-': k = Tok::Minus; break;
      case '=': k = Tok::Eq; break;
      default:
        throw SyntaxError(std::string("unexpected character '") + c + "'", l, cc);
    }
    push(k, std::string(1, c), l, cc);
    advance(1);
  }
  push(Tok::End, "", line, col);
  return out;
}

Token TokenStream::expect(Tok k, const char* context) {
  if (!at(k)) {
    std::string msg = std::string("expected ") + describe(k);
    if (context) msg += std::string(" ") + context;
    msg += ", found ";
    msg += at(Tok::End) ? describe(Tok::End) : "'" + peek().text + "'";
    fail(msg);
  }
  return next();
}

void TokenStream::fail(const std::string& what) const {
  throw SyntaxError(what, peek().line, peek().column);
}

bool at_value(const TokenStream& ts) {
  return ts.at(Tok::Int) || ts.at(Tok::Str) || ts.at(Tok::Null);
}

Value parse_value(TokenStream& ts) {
  Token t = ts.next();
  switch (t.kind) {
    case Tok::Int: return Value::integer(t.number);
    case Tok::Str: return Value::string(t.text);
    case Tok::Null: return Value::null(t.text);
    default:
      throw SyntaxError(std::string("expected a value, found ") + describe(t.kind), t.line,
                        t.column);
  }
}

Tuple parse_tuple(TokenStream& ts) {
  ts.expect(Tok::LParen);
  Tuple out;
  if (ts.accept(Tok::RParen)) return out;
  do {
    out.push_back(parse_value(ts));
  } while (ts.accept(Tok::Comma));
  ts.expect(Tok::RParen);
  return out;
}

}  // namespace nullq::detail
