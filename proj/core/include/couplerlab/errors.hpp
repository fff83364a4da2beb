#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace couplerlab {

// Base for every failure raised by the toolkit.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid structure, values or dimensions supplied by the caller.
class InvalidInputError : public Error {
 public:
  using Error::Error;
};

// The linear system could not be solved reliably.  Carries the label of the
// unknown at which elimination broke down and the offending pivot magnitude.
class SingularSystemError : public Error {
 public:
  SingularSystemError(const std::string& unknown, double pivot, const std::string& context)
      : Error(context + ": singular or numerically rank-deficient system at unknown '" + unknown +
              "' (pivot " + std::to_string(pivot) + ")"),
        unknown_(unknown),
        pivot_(pivot) {}

  const std::string& unknown() const { return unknown_; }
  double pivot() const { return pivot_; }

 private:
  std::string unknown_;
  double pivot_;
};

// A closed-form expression hit a removable or true singularity.
class DegenerateCaseError : public Error {
 public:
  using Error::Error;
};

// The requested coupler drives a common-mode signal onto the mains line.
class EmiInfeasibleError : public Error {
 public:
  using Error::Error;
};

}  // namespace couplerlab
