#pragma once

#include <stdexcept>
#include <string>

namespace curvkit {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Point outside a chart domain, on a removed set, or off a model surface.
class DomainError : public Error {
 public:
  using Error::Error;
};

// Metric failed the positive-definiteness threshold.
class SingularMetricError : public Error {
 public:
  using Error::Error;
};

// Input violates an operation's stated precondition (dimension, closedness,
// constant curvature, local conformal flatness, ...).
class PreconditionError : public Error {
 public:
  using Error::Error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

}  // namespace curvkit
