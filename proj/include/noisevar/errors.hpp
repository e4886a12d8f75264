#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace noisevar {

// A measurement that cannot enter the filter (NaN or infinity).
class InputError : public std::runtime_error {
 public:
  InputError(std::size_t index, const std::string& what)
      : std::runtime_error(what), index_(index) {}

  // Position of the offending sample in the stream.
  std::size_t index() const noexcept { return index_; }

 private:
  std::size_t index_;
};

// Caller broke a documented precondition (bad config, window size mismatch).
class ContractError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// The least-squares system of a correlation baseline could not be solved.
class FitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid scenario description. field() names the offending entry.
class SpecError : public std::runtime_error {
 public:
  SpecError(std::string field, const std::string& what)
      : std::runtime_error(field + ": " + what), field_(std::move(field)) {}

  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

// Malformed tabular input. row() is the 1-based line number in the file.
class DataError : public std::runtime_error {
 public:
  DataError(std::size_t row, const std::string& what)
      : std::runtime_error(what), row_(row) {}

  std::size_t row() const noexcept { return row_; }

 private:
  std::size_t row_;
};

}  // namespace noisevar
