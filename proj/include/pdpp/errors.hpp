#pragma once

#include <stdexcept>
#include <string>

// Error hierarchy shared by every module. The CLI maps each family onto an
// exit code: ConfigError -> 2, DataError -> 3, NumericError -> 4.
namespace pdpp {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Violated precondition of a library call (bad arguments, empty inputs).
class ContractError : public Error {
 public:
  using Error::Error;
};

class ShapeError : public ContractError {
 public:
  using ContractError::ContractError;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class DataError : public Error {
 public:
  using Error::Error;
};

class ParseError : public DataError {
 public:
  ParseError(const std::string& what, std::size_t line)
      : DataError("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// A record id is missing from, or disagrees in length with, an embedding file.
class AlignmentError : public DataError {
 public:
  using DataError::DataError;
};

class NumericError : public Error {
 public:
  using Error::Error;
};

class DivergenceError : public NumericError {
 public:
  DivergenceError(const std::string& what, std::size_t step)
      : NumericError(what), step_(step) {}
  std::size_t step() const noexcept { return step_; }

 private:
  std::size_t step_;
};

/// A metric that is not defined for the given inputs (e.g. AUC on one class).
class UndefinedMetricError : public Error {
 public:
  using Error::Error;
};

}  // namespace pdpp
