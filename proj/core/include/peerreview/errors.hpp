#pragma once

#include <stdexcept>
#include <string>

namespace peerreview {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input data or arguments violate a documented contract.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// File-system or network failure.
class IoError : public Error {
 public:
  using Error::Error;
};

/// A covariance block could not be factorized.
class NumericalError : public Error {
 public:
  NumericalError(const std::string& what, std::size_t block)
      : Error(what), block_(block) {}

  std::size_t block() const noexcept { return block_; }

 private:
  std::size_t block_;
};

}  // namespace peerreview
