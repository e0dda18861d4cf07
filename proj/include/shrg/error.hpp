#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace shrg {

// Base for every error raised by the library. CLI maps these to exit codes.
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

// Malformed input: bad bracketing, bad JSON schema, invariant violations.
class ValidationError : public Error {
  public:
    using Error::Error;
};

class ParseError : public ValidationError {
  public:
    ParseError(const std::string &what, std::size_t offset)
        : ValidationError(what + " at offset " + std::to_string(offset)), offset_(offset) {}
    std::size_t offset() const { return offset_; }

  private:
    std::size_t offset_;
};

// Hyperedge replacement / composition failures.
class CompositionError : public Error {
  public:
    using Error::Error;
};

class ArityError : public CompositionError {
  public:
    using CompositionError::CompositionError;
};

class LabelClashError : public CompositionError {
  public:
    using CompositionError::CompositionError;
};

// Raised by extraction when a tree/graph pair cannot be decomposed.
class ExtractionError : public Error {
  public:
    using Error::Error;
};

// Search-size guards (isomorphism node cap, oracle factorial cap).
class SizeLimitError : public Error {
  public:
    using Error::Error;
};

class StatsError : public Error {
  public:
    using Error::Error;
};

class IoError : public Error {
  public:
    using Error::Error;
};

} // namespace shrg
