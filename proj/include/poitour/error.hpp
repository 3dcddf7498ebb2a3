#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace poitour {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid hyperparameters, weights, or other caller-supplied settings.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Malformed input file or record. Carries the 1-based line number when known.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line = 0, std::string field = {})
      : Error(line == 0 ? what
                        : "line " + std::to_string(line) +
                              (field.empty() ? std::string{} : " field '" + field + "'") +
                              ": " + what),
        line_(line),
        field_(std::move(field)) {}

  std::size_t line() const noexcept { return line_; }
  const std::string& field() const noexcept { return field_; }

 private:
  std::size_t line_;
  std::string field_;
};

/// Not enough data to proceed (empty corpus, no evaluable trajectory, ...).
class DataError : public Error {
 public:
  using Error::Error;
};

/// A POI or token could not be resolved.
class LookupError : public Error {
 public:
  using Error::Error;
};

/// Training diverged (non-finite parameters).
class TrainingError : public Error {
 public:
  using Error::Error;
};

}  // namespace poitour
