#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace parrondo {

enum class ErrorCode {
  NonSquare,
  NegativeEntry,
  NonFiniteEntry,
  RowSumError,
  InvalidProbabilityVector,
  DimensionMismatch,
  NotIrreducible,
  SingularSystem,
  ZeroEntry,
  InvalidArgument,
  NoSignChange,
  NotMonotone,
};

const char* to_string(ErrorCode code);

// Every failure raised by the library. `row`/`col`/`value` carry the
// offending location for matrix validation errors and are otherwise unset.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}
  Error(ErrorCode code, const std::string& message, std::size_t row,
        std::size_t col, double value)
      : std::runtime_error(message),
        code_(code),
        row_(row),
        col_(col),
        value_(value) {}

  ErrorCode code() const noexcept { return code_; }
  std::size_t row() const noexcept { return row_; }
  std::size_t col() const noexcept { return col_; }
  double value() const noexcept { return value_; }

 private:
  ErrorCode code_;
  std::size_t row_ = 0;
  std::size_t col_ = 0;
  double value_ = 0.0;
};

}  // namespace parrondo
