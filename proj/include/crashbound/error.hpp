#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace crashbound {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Vector or matrix dimensions do not chain.
class ShapeError : public Error {
 public:
  using Error::Error;
};

/// Crash pattern or per-layer crash count out of range.
class PatternError : public Error {
 public:
  using Error::Error;
};

/// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// The operation is not defined for this network (e.g. multi-layer input
/// to a single-layer formula).
class UnsupportedError : public Error {
 public:
  using Error::Error;
};

/// Malformed binary input. `offset()` is the byte position of the problem.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t offset)
      : Error(what + " (byte offset " + std::to_string(offset) + ")"), offset_(offset) {}

  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

/// Network document does not match the schema or fails validation.
class SchemaError : public Error {
 public:
  using Error::Error;
};

/// Training produced a non-finite loss.
class TrainingError : public Error {
 public:
  TrainingError(const std::string& what, int epoch)
      : Error(what + " at epoch " + std::to_string(epoch)), epoch_(epoch) {}

  int epoch() const noexcept { return epoch_; }

 private:
  int epoch_;
};

}  // namespace crashbound
