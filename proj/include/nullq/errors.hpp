#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace nullq {

/// Base class of every error raised by the library.  The CLI maps
/// `ResourceError` to exit code 2 and everything else to exit code 1.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class SyntaxError : public Error {
 public:
  SyntaxError(const std::string& what, std::size_t line, std::size_t column)
      : Error(std::to_string(line) + ":" + std::to_string(column) + ": " + what),
        line_(line),
        column_(column) {}

  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

/// Unknown relation names and arity mismatches.
class SchemaError : public Error {
 public:
  using Error::Error;
};

/// A valuation that is not total on the nulls it is applied to.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A query outside the fragment an operation accepts (e.g. FO given to a
/// BCCQ-only rewriter).
class ClassificationError : public Error {
 public:
  using Error::Error;
};

class UnsupportedError : public Error {
 public:
  using Error::Error;
};

/// Ill-formed constructs: unsafe rules, EGD head violations, name clashes.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// A configured size cap was exceeded.
class ResourceError : public Error {
 public:
  ResourceError(const std::string& what, std::size_t cap) : Error(what), cap_(cap) {}
  std::size_t cap() const noexcept { return cap_; }

 private:
  std::size_t cap_;
};

}  // namespace nullq
