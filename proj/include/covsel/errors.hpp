#pragma once

#include <stdexcept>
#include <string>

namespace covsel {

// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed arguments: asymmetric matrices, negative penalties, bad indices.
class InvalidInput : public Error {
 public:
  using Error::Error;
};

// Eigensolver non-convergence, singular matrices, non-finite intermediates.
class NumericalFailure : public Error {
 public:
  using Error::Error;
};

// The SPG backtracking loop exhausted its budget without an acceptable step.
class StalledLineSearch : public Error {
 public:
  using Error::Error;
};

// Trace of Sigma is not positive, so the diagonal shift has no finite maximizer.
class DegenerateTrace : public Error {
 public:
  using Error::Error;
};

}  // namespace covsel
