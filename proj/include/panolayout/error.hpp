#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace panolayout {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad argument, out-of-range index or mismatched sizes.
class InputError : public Error {
 public:
  using Error::Error;
};

// Latitude at or beyond a pole.
class PoleError : public InputError {
 public:
  using InputError::InputError;
};

// A boundary on the wrong side of the horizon, a non-positive height, ...
class GeometryError : public Error {
 public:
  using Error::Error;
};

class EstimationError : public Error {
 public:
  using Error::Error;
};

class AssemblyError : public Error {
 public:
  using Error::Error;
};

class AmbiguityError : public Error {
 public:
  using Error::Error;
};

class ReconstructionError : public Error {
 public:
  using Error::Error;
};

class MetricError : public Error {
 public:
  using Error::Error;
};

class EmitError : public Error {
 public:
  using Error::Error;
};

/// Parse failure. `location` is a 1-based line number for line-oriented
/// formats and a 0-based byte offset for the signal format.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t location)
      : Error(what), location_(location) {}
  std::size_t location() const noexcept { return location_; }

 private:
  std::size_t location_;
};

}  // namespace panolayout
