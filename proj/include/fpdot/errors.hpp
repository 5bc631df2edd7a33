#pragma once

#include <stdexcept>
#include <string>

namespace fpdot {

/// Base class for all library errors.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Construction / validation errors.
struct NegativeWeight : Error {
  using Error::Error;
};
struct NonFiniteEntry : Error {
  using Error::Error;
};
struct NotNormalizable : Error {
  using Error::Error;
};
struct NotNormalized : Error {
  using Error::Error;
};
struct NotADensity : Error {
  using Error::Error;
};
struct DimensionMismatch : Error {
  using Error::Error;
};
struct InvalidArgument : Error {
  using Error::Error;
};

// Solver errors.
struct EpsilonNotPositive : Error {
  using Error::Error;
};
struct DegenerateReference : Error {
  using Error::Error;
};
struct Infeasible : Error {
  using Error::Error;
};
struct InfeasibleSupport : Error {
  using Error::Error;
};
struct EmptyFeasibleSet : Error {
  using Error::Error;
};
struct UnsupportedSize : Error {
  using Error::Error;
};
struct SizeGuardExceeded : Error {
  using Error::Error;
};

// File / front-end errors.
struct ParseError : Error {
  using Error::Error;
};

}  // namespace fpdot
