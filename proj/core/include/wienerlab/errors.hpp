#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace wienerlab {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

class IndexOutOfRange : public Error {
 public:
  using Error::Error;
};

/// A result term would exceed the configured degree cap.
class DegreeCapExceeded : public Error {
 public:
  DegreeCapExceeded(unsigned degree, unsigned cap)
      : Error("degree " + std::to_string(degree) + " exceeds degree cap " +
              std::to_string(cap)),
        degree_(degree),
        cap_(cap) {}

  unsigned degree() const noexcept { return degree_; }
  unsigned cap() const noexcept { return cap_; }

 private:
  unsigned degree_;
  unsigned cap_;
};

class DimensionCapExceeded : public Error {
 public:
  using Error::Error;
};

/// An operation was called outside its domain (non-centered input to the
/// inverse number operator, non-orthogonal directions, ...).
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// A field or operator failed the strict-past adaptedness check.
class NotPredictable : public PreconditionError {
 public:
  using PreconditionError::PreconditionError;
};

}  // namespace wienerlab
