#pragma once

#include <stdexcept>
#include <string>

namespace tmbench {

// Base class for all faults raised by this library. Data-level outcomes
// (validation violations, non-canonical words, parse warnings) are returned
// as values instead.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Input that violates a structural precondition (unknown symbol, bad file).
class MalformedInput : public Error {
 public:
  using Error::Error;
};

// Text or file that cannot be parsed. `line` is 1-based, 0 when unknown.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, int line = 0) : Error(what), line(line) {}
  int line;
};

// Invalid configuration (flags, config files, out-of-range parameters).
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Raised by emulation cycles that cannot complete.
class CycleError : public Error {
 public:
  enum class Kind { BudgetExhausted, TagHalt };
  CycleError(Kind kind, const std::string& what) : Error(what), kind(kind) {}
  Kind kind;
};

// Undefined statistic (empty sample, zero variance).
class StatsError : public Error {
 public:
  using Error::Error;
};

// Transport or protocol failure after retries are exhausted.
class ClientError : public Error {
 public:
  using Error::Error;
};

}  // namespace tmbench
