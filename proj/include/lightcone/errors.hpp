// errors.hpp
//
// Exception hierarchy for the light-cone counting library. The CLI maps
// these onto process exit codes (see tools/lcone.cpp).

#pragma once

#include <stdexcept>
#include <string>

namespace lightcone {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Vector or matrix of the wrong length/shape for the ambient dimension.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Input violates a type invariant (off-cone point, non-unit vector, ...).
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Request exceeds what exact enumeration can do at desk scale.
class CapabilityError : public Error {
 public:
  using Error::Error;
};

/// Operation precondition not met (e.g. T below T_0, too few samples).
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// Argument at a pole or outside the domain of a special function.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Regression could not be carried out (too few or degenerate points).
class FitError : public Error {
 public:
  using Error::Error;
};

/// A checked property failed; what() carries a JSON counterexample dump.
class PropertyViolation : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace lightcone
