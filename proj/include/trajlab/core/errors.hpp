#pragma once

#include <stdexcept>
#include <string>

namespace trajlab {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Shape or size mismatch between operands.
struct DimensionError : Error {
  using Error::Error;
};

/// Input outside an operation's domain (zero-norm vector, empty batch, ...).
struct DegenerateInputError : Error {
  using Error::Error;
};

/// Malformed file or record.
struct DataError : Error {
  using Error::Error;
};

/// NaN/Inf encountered where a finite value is required.
struct NumericError : Error {
  using Error::Error;
};

}  // namespace trajlab
