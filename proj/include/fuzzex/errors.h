#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace fuzzex {

// Base class for every error raised by the engine.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input text (ARFF header, Prolog clause, CSV record).
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t location)
      : Error(what), location_(location) {}
  // Line number (ARFF, CSV) or clause index (Prolog), 1-based for lines.
  std::size_t location() const { return location_; }

 private:
  std::size_t location_;
};

// A value outside a declared domain: unknown class, feature or term.
class DomainError : public Error {
 public:
  using Error::Error;
};

// Structurally valid input that violates an invariant.
class ValidationError : public Error {
 public:
  using Error::Error;
};

// Invalid configuration (cluster count, fuzzifier, smoothing parameter).
class ConfigError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

// An operation requested out of lifecycle order (e.g. query before build).
class ConflictError : public Error {
 public:
  using Error::Error;
};

}  // namespace fuzzex
