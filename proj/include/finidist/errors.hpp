#pragma once

#include <stdexcept>
#include <string>

namespace finidist {

// All library failures derive from Error so callers can catch one type.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A point that should lie on a unit sphere does not.
struct InvalidPointError : Error {
  using Error::Error;
};

// Argument outside the admissible range (dimension, radius, step, region).
struct DomainError : Error {
  using Error::Error;
};

// Invalid family parameters.
struct ParameterError : Error {
  using Error::Error;
};

// Evaluation or differentiation requested on a declared singular locus.
struct SingularPointError : Error {
  using Error::Error;
};

// Matrix shape does not match the requested operation.
struct ShapeError : Error {
  using Error::Error;
};

// An integrand failed off its declared singular set.
struct IntegrandError : Error {
  using Error::Error;
};

// A stated precondition of a check does not hold.
struct PreconditionError : Error {
  using Error::Error;
};

// Incompatible geometric configuration (overlapping caps and the like).
struct GeometryError : Error {
  using Error::Error;
};

}  // namespace finidist
