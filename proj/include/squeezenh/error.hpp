#pragma once

#include <limits>
#include <stdexcept>
#include <string>

namespace squeezenh {

// Bad user input: malformed config, out-of-range parameters. CLI exit code 1.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A numerical procedure could not deliver its contract. CLI exit code 2.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// The two slowest-decaying modes decay at the same rate, so no single mode dominates.
class AmbiguousSteadyStateError : public NumericalError {
 public:
  AmbiguousSteadyStateError() : NumericalError("ambiguous steady state") {}
};

class NotConvergedError : public NumericalError {
 public:
  NotConvergedError(const std::string& what, double best_residual)
      : NumericalError(what + " (best residual " + std::to_string(best_residual) + ")"),
        best_residual_(best_residual) {}

  double best_residual() const { return best_residual_; }

 private:
  double best_residual_ = std::numeric_limits<double>::quiet_NaN();
};

}  // namespace squeezenh
