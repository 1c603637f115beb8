#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace cascadekit {

// Root of every error the library throws. The CLI maps these to exit status 1.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input text (bad JSON, bad CSV row). Carries the 1-based line.
class ParseError : public Error {
 public:
  ParseError(std::string source, std::size_t line, const std::string& what)
      : Error(source + ":" + std::to_string(line) + ": " + what),
        source_(std::move(source)),
        line_(line) {}

  const std::string& source() const noexcept { return source_; }
  std::size_t line() const noexcept { return line_; }

 private:
  std::string source_;
  std::size_t line_;
};

// Well-formed input that violates a data-model invariant.
class ValidationError : public Error {
 public:
  using Error::Error;
};

// A metric was requested on a cascade that does not satisfy its precondition
// (e.g. structural virality of a single node).
class UndefinedMetricError : public Error {
 public:
  using Error::Error;
};

class InsufficientSampleError : public Error {
 public:
  using Error::Error;
};

// Sample has no spread, or violates the support of a distribution family.
class DegenerateSampleError : public Error {
 public:
  using Error::Error;
};

}  // namespace cascadekit
