#pragma once

#include <stdexcept>
#include <string>

namespace reftor {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Inconsistent shapes, unknown ids, mismatched basis tags.
class StructuralError : public Error {
 public:
  using Error::Error;
};

/// Input is well formed but outside the operation's domain
/// (non-acyclic complex, non-exact sequence, non-chain map, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A quantity that must be invertible or nonzero is numerically degenerate.
class DegeneracyError : public Error {
 public:
  using Error::Error;
};

/// The spectral cut lies too close to an eigenvalue modulus.
class SpectralGapError : public Error {
 public:
  using Error::Error;
};

/// An eigenvalue lies on (or too close to) the branch ray.
class AgmonError : public Error {
 public:
  using Error::Error;
};

/// Data does not define a cochain complex (twisted boundary squares to nonzero).
class DataError : public Error {
 public:
  using Error::Error;
};

/// ODE integration produced a (numerically) singular gauge transformation.
class IntegrationError : public Error {
 public:
  using Error::Error;
};

}  // namespace reftor
