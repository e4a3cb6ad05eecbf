#pragma once

#include <stdexcept>
#include <string>

namespace lyk {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad user input: malformed specs, out-of-range parameters, inadmissible data.
class InputError : public Error {
 public:
  using Error::Error;
};

/// Index or depth outside what has been computed.
class RangeError : public Error {
 public:
  using Error::Error;
};

/// Working precision is insufficient for a reliable answer.
class PrecisionError : public Error {
 public:
  using Error::Error;
};

/// The map is degenerate for the requested computation
/// (e.g. the critical orbit lands on a boundary fixed point).
class DegenerateError : public Error {
 public:
  using Error::Error;
};

/// A stated hypothesis of an operation does not hold for the supplied data.
class HypothesisError : public Error {
 public:
  using Error::Error;
};

}  // namespace lyk
