#pragma once

#include <stdexcept>
#include <string>

namespace mockdissect {

// Base for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Arithmetic precondition violated (order mismatch, non-unit inverse, pole).
class DomainError : public Error {
 public:
  using Error::Error;
};

// A coefficient at or beyond the known precision was requested.
class PrecisionError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& what, int line = 0)
      : Error(line > 0 ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

}  // namespace mockdissect
