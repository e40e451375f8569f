#pragma once

#include <stdexcept>
#include <string>

namespace eulercalc {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input structure: empty grids, mismatched complexes, invalid
/// polygons, non-finite intersection data.
class StructuralError : public Error {
 public:
  using Error::Error;
};

/// An integrand sampled twice inside one arrangement cell gave two values.
class IntegrandNotConstructible : public Error {
 public:
  using Error::Error;
};

/// Floating-point sweeps found critical values or ordinates too close to
/// separate reliably.
class GenericityError : public Error {
 public:
  using Error::Error;
};

/// Inversion arithmetic did not divide exactly.
class ExactDivisionError : public Error {
 public:
  using Error::Error;
};

class NonInvertibleKernel : public Error {
 public:
  using Error::Error;
};

/// A kernel was combined with a shape type it does not support.
class UnsupportedCombination : public Error {
 public:
  using Error::Error;
};

/// Symmetry or parity check failed inside a computation.
class InternalConsistencyError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

}  // namespace eulercalc
