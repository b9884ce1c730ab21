#pragma once

#include <limits>
#include <stdexcept>
#include <string>

namespace invobs {

// State or estimate outside the admissible set of a system (nonpositive
// concentration, non-unit quaternion, ...).
class DomainError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NumericError : public std::runtime_error {
 public:
  explicit NumericError(const std::string& what,
                        double t = std::numeric_limits<double>::quiet_NaN());
  // Simulation time at which the failure happened, NaN when not applicable.
  double time() const { return t_; }

 private:
  double t_;
};

// Bad user input: configuration values, dimensions, flags.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace invobs
