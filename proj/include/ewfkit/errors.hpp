#pragma once

#include <stdexcept>
#include <string>

namespace ewfkit {

/// Base class for every error thrown by this library.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DimensionMismatch : Error {
  using Error::Error;
};

struct NotHermitian : Error {
  using Error::Error;
};

struct NotPositiveDefinite : Error {
  using Error::Error;
};

struct NoConvergence : Error {
  using Error::Error;
};

struct RankDeficient : Error {
  using Error::Error;
};

struct SingularTriangular : Error {
  using Error::Error;
};

struct NotOrthonormal : Error {
  using Error::Error;
};

struct NotAnSwf : Error {
  using Error::Error;
};

/// A certified internal identity failed to hold; indicates a library bug,
/// not a user error.
struct InternalInvariantViolation : Error {
  using Error::Error;
};

struct TooFewSamples : Error {
  using Error::Error;
};

struct BadSymbolIndex : Error {
  using Error::Error;
};

struct SearchSpaceTooLarge : Error {
  using Error::Error;
};

struct ConfigError : Error {
  using Error::Error;
};

struct IoError : Error {
  using Error::Error;
};

}  // namespace ewfkit
