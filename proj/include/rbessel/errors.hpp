#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace rbessel {

// Argument outside the mathematical domain of an operation (H outside (0,1),
// negative time, non-finite input, empty ladder, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// A sampling method cannot produce the requested sample (negative circulant
// spectrum with fallback disabled, Cholesky size cap, non-PD covariance).
class MethodError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// All observations equal: the quadratic variation vanishes and the Hurst
// estimator is undefined.
class DegeneratePathError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input text. `line` is 1-based; 0 when not tied to a line.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : std::runtime_error(line ? "line " + std::to_string(line) + ": " + what : what),
        line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

// Experiment configuration does not satisfy the schema. `field` is a dotted
// path such as "cells[2].n".
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& field, const std::string& what)
      : std::runtime_error(field + ": " + what), field_(field) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

}  // namespace rbessel
