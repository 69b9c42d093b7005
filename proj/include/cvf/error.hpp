#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace cvf {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed expression source. position() is a 0-based byte offset.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t position)
      : Error(what + " at position " + std::to_string(position)), position_(position) {}
  std::size_t position() const { return position_; }

 private:
  std::size_t position_;
};

// Evaluation left the real domain of an expression (x/0, log of x <= 0, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

// Point outside the chart, or a metric value that is not a usable inner product.
class ChartError : public Error {
 public:
  using Error::Error;
};

// An operation was called with arguments violating its documented precondition.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

}  // namespace cvf
