#pragma once

#include <stdexcept>
#include <string>

namespace sparsefit {

// Base for every error raised by the library. The CLI maps the subclasses
// onto exit codes, so keep the hierarchy flat.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

// Malformed input data: non-finite entries, bad responses, missing columns.
class DataError : public Error {
 public:
  using Error::Error;
};

// Malformed user input that is not data (penalty strings, config files).
class ParseError : public Error {
 public:
  using Error::Error;
};

class SingularDesign : public Error {
 public:
  using Error::Error;
};

class NonConvergence : public Error {
 public:
  using Error::Error;
};

// A procedure was handed a penalty family it does not support.
class FamilyMismatch : public Error {
 public:
  using Error::Error;
};

class TooManyPredictors : public Error {
 public:
  using Error::Error;
};

}  // namespace sparsefit
