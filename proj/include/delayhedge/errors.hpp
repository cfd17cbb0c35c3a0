#pragma once

#include <stdexcept>
#include <string>

namespace delayhedge {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// A matrix required to be positive definite failed its Cholesky pivot test.
class NotPositiveDefinite : public Error {
public:
  using Error::Error;
};

/// Mismatched dimensions or out-of-range indices between related inputs.
class DimensionMismatch : public Error {
public:
  using Error::Error;
};

/// An index range (a, b, i, j) violating a <= i <= b <= j or producing a
/// non-increasing index vector.
class InvalidRange : public Error {
public:
  using Error::Error;
};

/// A scalar parameter outside its admissible set.
class InvalidParameter : public Error {
public:
  using Error::Error;
};

/// Malformed model or vector file.
class ParseError : public Error {
public:
  using Error::Error;
};

/// A principal minor used as a denominator in the band fill collapsed to
/// zero; signals numerical breakdown, never regularized away.
class SingularPrincipalMinor : public Error {
public:
  using Error::Error;
};

/// The filled band matrix R lost positive definiteness.
class ResultNotPD : public Error {
public:
  using Error::Error;
};

/// A diagonal entry required as a divisor is numerically zero.
class DivisionByZero : public Error {
public:
  using Error::Error;
};

/// The expected utility of the evaluated strategy is -infinity.
class UtilityDiverges : public Error {
public:
  using Error::Error;
};

}  // namespace delayhedge
