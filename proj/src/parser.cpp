#include "nullq/parser.hpp"

#include <fstream>
#include <sstream>

#include "lexer.hpp"
#include "nullq/errors.hpp"

namespace nullq {

namespace {

using detail::Tok;
using detail::TokenStream;

bool keyword(const std::string& s) {
  return s == "exists" || s == "forall" || s == "true" || s == "false" || s == "isnull";
}

class Parser {
 public:
  explicit Parser(TokenStream& ts) : ts_(ts) {}

  Formula formula() { return impl(); }

 private:
  Formula impl() {
    Formula lhs = union_();
    if (ts_.accept(Tok::Arrow)) return Formula::implies(lhs, impl());
    return lhs;
  }

  Formula union_() {
    std::vector<Formula> items{diff()};
    while (ts_.accept(Tok::Bar)) items.push_back(diff());
    return Formula::disj(std::move(items));
  }

  Formula diff() {
    Formula acc = conj();
    while (ts_.accept(Tok::Minus)) acc = Formula::conj({acc, Formula::negate(conj())});
    return acc;
  }

  Formula conj() {
    std::vector<Formula> items{unary()};
    while (ts_.accept(Tok::Amp)) items.push_back(unary());
    return Formula::conj(std::move(items));
  }

  Formula unary() {
    if (ts_.accept(Tok::Bang)) return Formula::negate(unary());
    if (ts_.at_ident("exists") || ts_.at_ident("forall")) {
      bool ex = ts_.next().text == "exists";
      std::vector<std::string> vars;
      while (ts_.at(Tok::Ident)) {
        if (keyword(ts_.peek().text)) ts_.fail("keyword used as a variable");
        vars.push_back(ts_.next().text);
      }
      if (vars.empty()) ts_.fail("expected quantified variables");
      ts_.expect(Tok::LParen, "after quantified variables");
      Formula body = formula();
      ts_.expect(Tok::RParen, "closing quantifier body");
      return ex ? Formula::exists(std::move(vars), std::move(body))
                : Formula::forall(std::move(vars), std::move(body));
    }
    return primary();
  }

  Formula primary() {
    if (ts_.accept(Tok::LParen)) {
      Formula f = formula();
      ts_.expect(Tok::RParen);
      return f;
    }
    if (ts_.at_ident("true")) {
      ts_.next();
      return Formula::truth();
    }
    if (ts_.at_ident("false")) {
      ts_.next();
      return Formula::falsity();
    }
    if (ts_.at_ident("isnull")) {
      ts_.next();
      ts_.expect(Tok::LParen, "after isnull");
      Term t = term();
      ts_.expect(Tok::RParen);
      return Formula::is_null(std::move(t));
    }
    if (ts_.at(Tok::Ident) && ts_.peek(1).kind == Tok::LParen) {
      std::string rel = ts_.next().text;
      ts_.next();
      std::vector<Term> args;
      if (!ts_.at(Tok::RParen)) {
        do {
          args.push_back(term());
        } while (ts_.accept(Tok::Comma));
      }
      ts_.expect(Tok::RParen, "closing atom");
      return Formula::atom(std::move(rel), std::move(args));
    }
    Term a = term();
    ts_.expect(Tok::Eq, "in equality");
    Term b = term();
    return Formula::eq(std::move(a), std::move(b));
  }

  Term term() {
    if (ts_.at(Tok::Ident)) {
      if (keyword(ts_.peek().text)) ts_.fail("unexpected keyword '" + ts_.peek().text + "'");
      return Term::var(ts_.next().text);
    }
    if (ts_.at(Tok::Int) || ts_.at(Tok::Str)) return Term::constant(detail::parse_value(ts_));
    ts_.fail(std::string("expected a term, found ") +
             (ts_.at(Tok::End) ? "end of input" : "'" + ts_.peek().text + "'"));
  }

  TokenStream& ts_;
};

}  // namespace

Formula parse_formula(std::string_view text) {
  TokenStream ts(detail::tokenize(text, false));
  Parser p(ts);
  Formula f = p.formula();
  if (!ts.at(Tok::End)) ts.fail("unexpected '" + ts.peek().text + "'");
  return f;
}

Query parse_query(std::string_view text) {
  Formula f = parse_formula(text);
  (void)f.relations();
  return Query::from(std::move(f));
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace nullq
