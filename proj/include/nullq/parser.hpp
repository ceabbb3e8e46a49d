#pragma once

#include <string>
#include <string_view>

#include "nullq/formula.hpp"

namespace nullq {

/// Query grammar, loosest binding first:
///
///   formula := impl
///   impl    := union ('->' impl)?
///   union   := diff ('|' diff)*
///   diff    := conj ('-' conj)*          A - B  ≡  A & !B
///   conj    := unary ('&' unary)*
///   unary   := '!' unary | 'exists' var+ '(' formula ')'
///            | 'forall' var+ '(' formula ')' | primary
///   primary := Rel '(' terms ')' | term '=' term | 'isnull' '(' term ')'
///            | 'true' | 'false' | '(' formula ')'
///
/// Constants are integers or double-quoted strings; variables are bare
/// identifiers.  Throws SyntaxError with line and column.
Formula parse_formula(std::string_view text);

/// Parse and classify.  Free variables become answer variables.
Query parse_query(std::string_view text);

std::string read_file(const std::string& path);

}  // namespace nullq
