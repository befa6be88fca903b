#pragma once

#include <stdexcept>
#include <string>

namespace cueload {

// Base of every error the library raises. The CLI maps data errors to exit
// code 2 and usage errors to 1.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  virtual bool is_data_error() const noexcept { return true; }
};

class ParseError : public Error {
 public:
  ParseError(std::string source, std::size_t line, const std::string& what)
      : Error(source + ":" + std::to_string(line) + ": " + what),
        source_(std::move(source)),
        line_(line) {}
  std::size_t line() const noexcept { return line_; }
  const std::string& source() const noexcept { return source_; }

 private:
  std::string source_;
  std::size_t line_;
};

// Dependency graph violations (self loops, cycles, multiple roots).
class StructureError : public Error {
 public:
  using Error::Error;
};

class ValidationError : public Error {
 public:
  using Error::Error;
};

// Annotation or exchange record that does not resolve against the corpus.
class ResolutionError : public Error {
 public:
  using Error::Error;
};

class AlignmentError : public Error {
 public:
  using Error::Error;
};

// A quantity that is mathematically undefined on the given input, e.g. the
// mean surprisal of an empty sequence or the ADL of a tree without arcs.
class UndefinedValueError : public Error {
 public:
  using Error::Error;
};

class MissingTreeError : public UndefinedValueError {
 public:
  using UndefinedValueError::UndefinedValueError;
};

class DegenerateDataError : public Error {
 public:
  using Error::Error;
};

// Caller passed arguments outside a documented precondition.
class UsageError : public Error {
 public:
  using Error::Error;
  bool is_data_error() const noexcept override { return false; }
};

}  // namespace cueload
