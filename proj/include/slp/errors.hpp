#pragma once

#include <stdexcept>
#include <string>

namespace slp {

// Invalid configuration or precondition on user-supplied parameters.
// key() names the offending configuration key when one applies.
class ConfigError : public std::invalid_argument {
 public:
  explicit ConfigError(const std::string& message, std::string key = {})
      : std::invalid_argument(message), key_(std::move(key)) {}

  const std::string& key() const noexcept { return key_; }

 private:
  std::string key_;
};

// A CI margin too small for the in-block power allocation to be defined.
class DegenerateMarginError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Numerical failure: rank-deficient channel, solver not converged.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace slp
