#pragma once

#include <stdexcept>

namespace grfb {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Shapes, bit widths or scheme parameters outside the supported set.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Inputs that violate a documented precondition (non-unitary matrix, bad
// probability vector, ...).
class ValidationError : public Error {
 public:
  using Error::Error;
};

// Truncated, over-long or otherwise undecodable feedback payloads.
class CorruptMessage : public Error {
 public:
  using Error::Error;
};

class NumericalError : public Error {
 public:
  using Error::Error;
};

}  // namespace grfb
