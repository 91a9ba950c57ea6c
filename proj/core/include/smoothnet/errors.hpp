#pragma once

#include <stdexcept>
#include <string>

namespace smoothnet {

/// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Dimension or layout mismatch between operands.
class ShapeError : public Error {
 public:
  explicit ShapeError(const std::string& msg) : Error(msg) {}
};

/// Invalid configuration value (bad spec field, out-of-range hyperparameter).
class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& msg) : Error(msg) {}
};

/// Malformed input document (JSON/CSV).
class ParseError : public Error {
 public:
  explicit ParseError(const std::string& msg) : Error(msg) {}
};

/// Filesystem failure (missing file, unwritable directory).
class IoError : public Error {
 public:
  explicit IoError(const std::string& msg) : Error(msg) {}
};

/// Non-finite values or numeric breakdown.
class NumericError : public Error {
 public:
  explicit NumericError(const std::string& msg) : Error(msg) {}
};

/// Rank-deficient system passed to a solver.
class SingularError : public NumericError {
 public:
  explicit SingularError(const std::string& msg) : NumericError(msg) {}
};

/// Degenerate frame that cannot be aligned (all joints coincident).
class AlignmentError : public NumericError {
 public:
  explicit AlignmentError(const std::string& msg) : NumericError(msg) {}
};

}  // namespace smoothnet
