#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace graphtrans {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Non-finite value encountered in a computation.
class NumericError : public Error {
 public:
  using Error::Error;
};

class InsufficientData : public Error {
 public:
  using Error::Error;
};

/// Malformed or truncated input file. `offset` is the byte offset (or line
/// number for text formats) where parsing stopped.
class IngestionError : public Error {
 public:
  IngestionError(const std::string& what, std::size_t offset)
      : Error(what + " (at offset " + std::to_string(offset) + ")"), offset_(offset) {}
  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

class CorruptRecord : public IngestionError {
 public:
  using IngestionError::IngestionError;
};

class TrainingDiverged : public Error {
 public:
  explicit TrainingDiverged(std::size_t step)
      : Error("training diverged: non-finite loss at step " + std::to_string(step)), step_(step) {}
  std::size_t step() const { return step_; }

 private:
  std::size_t step_;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

}  // namespace graphtrans
