#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace sdlab {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid user-supplied configuration (flags, generator params, descriptors).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Operation called outside its documented preconditions.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// A per-edge vector does not line up with the graph's edge list.
class AlignmentError : public Error {
 public:
  using Error::Error;
};

class ShapeError : public Error {
 public:
  using Error::Error;
};

/// Structurally valid input that violates a domain invariant.
class ValidationError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

/// Non-finite loss during optimization.
class TrainingError : public Error {
 public:
  TrainingError(const std::string& what, int epoch) : Error(what), epoch_(epoch) {}
  int epoch() const noexcept { return epoch_; }

 private:
  int epoch_;
};

}  // namespace sdlab
