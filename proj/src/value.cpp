#include "nullq/value.hpp"

namespace nullq {

std::string quote(std::string_view s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    if (c == '\n') {
      out += "\\n";
      continue;
    }
    out += c;
  }
  out += '"';
  return out;
}

std::string Value::to_string() const {
  switch (kind_) {
    case Kind::Int:
      return std::to_string(int_);
    case Kind::Str:
      return quote(text_);
    case Kind::Null:
      return "_" + text_;
  }
  return {};
}

std::string to_string(const Tuple& t) {
  std::string out;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (i) out += ", ";
    out += t[i].to_string();
  }
  return out;
}

}  // namespace nullq
