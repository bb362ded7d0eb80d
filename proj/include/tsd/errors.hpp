#pragma once

#include <stdexcept>
#include <string>

namespace tsd {

/// Argument outside the mathematical domain of an operation (s <= 0, eps <= 0, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A numerical procedure failed to reach its tolerance. Carries the last estimate.
class NumericError : public std::runtime_error {
 public:
  NumericError(const std::string& what, double last_estimate, double last_error = 0.0)
      : std::runtime_error(what), last_estimate_(last_estimate), last_error_(last_error) {}

  double last_estimate() const noexcept { return last_estimate_; }
  double last_error() const noexcept { return last_error_; }

 private:
  double last_estimate_;
  double last_error_;
};

/// Operation not supported for this profile / dimension / configuration.
class UnsupportedError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A stated precondition of the operation (moment finiteness, ...) does not hold.
class PreconditionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Spectral measure lies in a proper subspace.
class DegeneracyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Time outside the envelope's regime.
class RegimeError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Grid too coarse / too small for the requested computation.
class GridError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace tsd
