#pragma once

#include <stdexcept>
#include <string>

namespace harvest {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operand shapes disagree (input width, direction length, buffer lengths).
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// A derivative of order above two was requested.
class UnsupportedOrderError : public Error {
 public:
  using Error::Error;
};

/// NaN or infinity appeared during training.
class DivergenceError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class CheckpointError : public Error {
 public:
  using Error::Error;
};

/// A sampling request cannot be met (empty pool, degenerate level set).
class SamplingError : public Error {
 public:
  using Error::Error;
};

class ConvergenceError : public Error {
 public:
  using Error::Error;
};

}  // namespace harvest
