#pragma once

#include <stdexcept>
#include <string>

namespace fockdec {

/// Base class for all numerical and precondition failures in this library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Two operands live on different mode spaces.
class ModeMismatchError : public Error {
 public:
  using Error::Error;
};

/// A creator with (relatively) vanishing vacuum amplitude cannot be inverted,
/// so it admits neither a logarithm nor an inverse.
class NonInvertibleError : public Error {
 public:
  using Error::Error;
};

/// The combined subsystem energy spread vanishes; the time interval that the
/// geometry assigns to a subsystem change is undefined.
class DegenerateEnergyError : public Error {
 public:
  using Error::Error;
};

/// The combined subsystem number spread vanishes; phase-orbit quantities
/// are undefined.
class DegenerateNumberError : public Error {
 public:
  using Error::Error;
};

/// A single step would move the decomposition outside the quadratic regime
/// the step formulas assume.
class StepTooLargeError : public Error {
 public:
  using Error::Error;
};

/// The linear system of a stability step is numerically singular.
class SingularSystemError : public Error {
 public:
  using Error::Error;
};

}  // namespace fockdec
