#pragma once

#include <stdexcept>
#include <string>

namespace expcol {

/// Invalid argument to a library operation (bad dimension, out-of-range order, ...).
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A computation produced non-finite values or failed to converge where that is fatal.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace expcol
