#pragma once

#include <stdexcept>
#include <string>

namespace serum {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input, configuration or precondition violation.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// A computation hit a degenerate denominator (uninformative reference,
/// collapsed moments). Callers route these to the zero-score branch.
class DegenerateError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace serum
