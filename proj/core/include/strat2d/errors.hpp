#pragma once

#include <stdexcept>
#include <string>

namespace strat2d {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

class GridMismatch : public Error {
 public:
  using Error::Error;
};

class SymmetryViolation : public Error {
 public:
  using Error::Error;
};

/// A homogeneous operator (negative power of Lambda, inverse Laplacian,
/// Riesz transform, H^{-1} pairing) was applied to a field with a mean.
class NonzeroMean : public Error {
 public:
  using Error::Error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class OutOfRange : public Error {
 public:
  using Error::Error;
};

/// Non-finite values or runaway growth detected during time stepping.
class BlowupSuspected : public Error {
 public:
  explicit BlowupSuspected(double t, const std::string& what)
      : Error(what), time_(t) {}
  double time() const noexcept { return time_; }

 private:
  double time_;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace strat2d
