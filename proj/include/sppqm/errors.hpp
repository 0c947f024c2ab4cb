#pragma once

#include <stdexcept>
#include <string>

namespace sppqm {

// Base of everything the library throws on purpose. The CLI maps ConfigError
// to exit code 2 and the rest to exit code 1.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Argument outside the domain where a formula is defined.
class DomainError : public Error {
 public:
  using Error::Error;
};

// Evaluation hit an exact pole or branch point.
class SingularityError : public Error {
 public:
  using Error::Error;
};

// A bracketed root search found no sign change.
class NoSolutionError : public Error {
 public:
  using Error::Error;
};

// Quadrature or integration failed to reach the requested accuracy.
class NumericError : public Error {
 public:
  using Error::Error;
};

// Inconsistent or missing configuration, detected before any computation.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace sppqm
