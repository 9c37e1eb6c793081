#pragma once

#include <stdexcept>
#include <string>

namespace covclust {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A matrix required to be (strictly) positive definite is not.
struct SingularMatrixError : Error {
  using Error::Error;
};

/// A shape vector whose product must be 1 deviates too far.
struct InvalidShapeError : Error {
  using Error::Error;
};

/// Optimal truncation received only zeros.
struct AllZeroValuesError : Error {
  using Error::Error;
};

/// Number of covariance classes outside [1, k].
struct InvalidGError : Error {
  using Error::Error;
};

struct TooFewObservationsError : Error {
  using Error::Error;
};

/// A labeled group is empty (discriminant fitting / LOO removal).
struct EmptyGroupError : Error {
  using Error::Error;
};

/// An EM component collapsed (effective sample size ~ 0); the driver
/// restarts the initialization rather than repairing.
struct DegenerateComponentError : Error {
  using Error::Error;
};

struct IoError : Error {
  using Error::Error;
};

}  // namespace covclust
