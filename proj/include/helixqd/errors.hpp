#pragma once

#include <stdexcept>
#include <string>

namespace helixqd {

// Base class for every error raised by the library. Subclasses map onto the
// CLI exit codes (config problems vs. numerical failures).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// Evaluation of the bare Coulomb-type potential at s = 0.
class SingularInput : public Error {
 public:
  using Error::Error;
};

class DomainTooSmall : public Error {
 public:
  using Error::Error;
};

class DiagonalizationFailure : public Error {
 public:
  using Error::Error;
};

class InsufficientStates : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace helixqd
