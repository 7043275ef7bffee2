#pragma once

#include <stdexcept>
#include <string>

namespace hallufix {

// Base class for all toolkit errors. The CLI maps subclasses onto its
// exit-code taxonomy: ConfigError -> 2, DataError -> 3, NumericalError -> 4.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class DataError : public Error {
 public:
  using Error::Error;
};

class NumericalError : public Error {
 public:
  using Error::Error;
};

// --- data errors ---
class ParseError : public DataError {
 public:
  using DataError::DataError;
};
class UnsupportedFormat : public DataError {
 public:
  using DataError::DataError;
};
class IoError : public DataError {
 public:
  using DataError::DataError;
};
class EmptyMesh : public DataError {
 public:
  using DataError::DataError;
};
class EmptyCloud : public DataError {
 public:
  using DataError::DataError;
};
class EmptyDistribution : public DataError {
 public:
  using DataError::DataError;
};
class TooFewPoints : public DataError {
 public:
  using DataError::DataError;
};
class ScorerFailure : public DataError {
 public:
  using DataError::DataError;
};

// --- contract violations ---
class ShapeMismatch : public ConfigError {
 public:
  using ConfigError::ConfigError;
};
class SizeLimit : public ConfigError {
 public:
  using ConfigError::ConfigError;
};
class UnsupportedCount : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

// --- numerical failures ---
class DegenerateExtent : public NumericalError {
 public:
  using NumericalError::NumericalError;
};
class NoValidPixels : public NumericalError {
 public:
  using NumericalError::NumericalError;
};
class ZeroVector : public NumericalError {
 public:
  using NumericalError::NumericalError;
};
class DegenerateWeights : public NumericalError {
 public:
  using NumericalError::NumericalError;
};
class NonFiniteLoss : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

}  // namespace hallufix
