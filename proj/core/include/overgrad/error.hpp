#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace overgrad {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A precondition on a scalar argument or dimension was violated.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Two objects that must agree in shape do not.
class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

/// Dataset contents violate the unit-norm / bounded-label / finiteness rules.
class DataError : public Error {
 public:
  using Error::Error;
};

/// lambda_min(H_inf) is at or below the degeneracy tolerance.
class DegenerateData : public Error {
 public:
  DegenerateData(const std::string& what, double lambda_min)
      : Error(what), lambda_min_(lambda_min) {}
  double lambda_min() const noexcept { return lambda_min_; }

 private:
  double lambda_min_;
};

/// Malformed file: CSV arity, bad numbers, bad binary header.
class FormatError : public Error {
 public:
  using Error::Error;
};

/// Experiment configuration failed validation; carries every violated field.
class ConfigError : public Error {
 public:
  explicit ConfigError(std::vector<std::string> violations);
  const std::vector<std::string>& violations() const noexcept { return violations_; }

 private:
  std::vector<std::string> violations_;
};

}  // namespace overgrad
