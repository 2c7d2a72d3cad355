#pragma once

#include <stdexcept>
#include <string>

namespace phoneval {

/// Base class for every error raised by the toolkit.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// File could not be opened, read or written.
class IoError : public Error {
 public:
  using Error::Error;
};

/// File content does not follow the expected format (WAV header, CSV row, ...).
class FormatError : public Error {
 public:
  using Error::Error;
};

/// Invalid run configuration or invalid parameter block.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Shapes of two operands do not agree.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// A computation produced a non-finite or otherwise unusable result.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// Operation precondition violated by an argument value.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

}  // namespace phoneval
