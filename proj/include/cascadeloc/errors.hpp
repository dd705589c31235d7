#pragma once

#include <stdexcept>
#include <string>

namespace cascadeloc {

class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Vectors or tables whose lengths disagree.
class DimensionError : public Error {
public:
  using Error::Error;
};

// A header lacks a configured column, or the sidecar metadata is malformed.
class SchemaError : public Error {
public:
  using Error::Error;
};

// A cell that cannot be read as a number. Carries 1-based row and the column name.
class ParseError : public Error {
public:
  ParseError(std::size_t row, std::string column, const std::string &what)
      : Error(what), row_(row), column_(std::move(column)) {}
  std::size_t row() const noexcept { return row_; }
  const std::string &column() const noexcept { return column_; }

private:
  std::size_t row_;
  std::string column_;
};

class EmptyDatasetError : public Error {
public:
  using Error::Error;
};

class ParameterError : public Error {
public:
  using Error::Error;
};

class DivergenceError : public Error {
public:
  DivergenceError(int epoch, const std::string &what) : Error(what), epoch_(epoch) {}
  int epoch() const noexcept { return epoch_; }

private:
  int epoch_;
};

class UnsupportedBenchmarkError : public Error {
public:
  using Error::Error;
};

class ConfigError : public Error {
public:
  using Error::Error;
};

// Loaded data violates RadioMap invariants.
class ValidationError : public Error {
public:
  using Error::Error;
};

} // namespace cascadeloc
