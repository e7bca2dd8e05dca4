#pragma once

#include <stdexcept>
#include <string>

namespace riskroute {

/// Base class of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input: invalid distribution, bad parameter, unparsable spec.
class InvalidInput : public Error {
 public:
  using Error::Error;
};

/// Conditioning on an event of (numerically) zero probability.
class ZeroMassError : public Error {
 public:
  using Error::Error;
};

/// The functional has no implementation for this distribution kind.
class UnsupportedDistribution : public Error {
 public:
  using Error::Error;
};

/// A value lies outside the domain of a utility function.
class DomainError : public Error {
 public:
  using Error::Error;
};

class NoPathError : public Error {
 public:
  using Error::Error;
};

class NegativeCycleError : public Error {
 public:
  using Error::Error;
};

/// Enumeration would exceed its configured size guard.
class CapacityError : public Error {
 public:
  using Error::Error;
};

/// A separable (arc-weight) algorithm was given a risk measure that does
/// not split over independent sums.
class NonAdditiveSpecError : public Error {
 public:
  using Error::Error;
};

/// Link cost decreases with load somewhere on the checked grid.
class MonotonicityError : public Error {
 public:
  using Error::Error;
};

/// An internal cross-check between two evaluation routes disagreed.
class InternalError : public Error {
 public:
  using Error::Error;
};

}  // namespace riskroute
