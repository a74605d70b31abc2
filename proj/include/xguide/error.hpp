#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace xguide {

// Base for every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Tensor/mask/model dimensions disagree.
class ShapeError : public Error {
 public:
  using Error::Error;
};

// A file could not be parsed. `offset` is the byte position of the failure.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t offset)
      : Error(what + " (at byte " + std::to_string(offset) + ")"), message_(what), offset_(offset) {}
  std::size_t offset() const { return offset_; }
  // Description without the offset suffix.
  const std::string& message() const { return message_; }

 private:
  std::string message_;
  std::size_t offset_;
};

// Missing files, unreadable manifests, bad field values.
class DataError : public Error {
 public:
  using Error::Error;
};

// Non-finite values, divergence, degenerate statistics.
class NumericError : public Error {
 public:
  using Error::Error;
};

// Invalid argument combination supplied by the caller.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace xguide
