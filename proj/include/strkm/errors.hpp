#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace strkm {

// Error hierarchy. Every failure raised by the library derives from Error so
// the CLI can map categories onto stable exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Dimension mismatch between operands.
class ShapeError : public Error {
 public:
  using Error::Error;
};

// A documented precondition was violated by the caller.
class ContractError : public Error {
 public:
  using Error::Error;
};

// Rank deficiency or other degenerate input to a factorization.
class DegeneracyError : public Error {
 public:
  using Error::Error;
};

// Invalid configuration value.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Non-finite values or an invariant breach during a numeric procedure.
class NumericError : public Error {
 public:
  using Error::Error;
};

// Operation not supported for the given input (e.g. non-smooth activation).
class UnsupportedError : public Error {
 public:
  using Error::Error;
};

// Malformed file contents. Carries the byte offset where parsing failed.
class ParseError : public Error {
 public:
  ParseError(std::size_t offset, const std::string& what)
      : Error("parse error at byte " + std::to_string(offset) + ": " + what),
        offset_(offset) {}

  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

}  // namespace strkm
