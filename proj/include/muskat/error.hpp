#ifndef MUSKAT_ERROR_HPP
#define MUSKAT_ERROR_HPP

#include <stdexcept>
#include <string>

namespace muskat {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidInput : public Error {
 public:
  using Error::Error;
};

/// A spectrum that should represent a real profile is not conjugate symmetric.
class SymmetryViolation : public Error {
 public:
  using Error::Error;
};

class GridMismatch : public Error {
 public:
  using Error::Error;
};

/// NaN/Inf produced inside a computation (kernel, time step, ...).
class NumericFailure : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class NearSingular : public Error {
 public:
  using Error::Error;
};

class Stagnation : public Error {
 public:
  using Error::Error;
};

class InsufficientData : public Error {
 public:
  using Error::Error;
};

/// Biot-Savart target too close to the interface for direct quadrature.
class NearInterface : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace muskat

#endif  // MUSKAT_ERROR_HPP
