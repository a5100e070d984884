#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace chemochip {

/// Bad configuration or inconsistent geometry.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A state outside the model's domain (pole of a coefficient, non-finite value).
struct InvalidStateError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// The coupled step did not reach the residual tolerance.
struct SolverError : std::runtime_error {
  SolverError(const std::string& what, std::vector<double> history)
      : std::runtime_error(what), residual_history(std::move(history)) {}
  std::vector<double> residual_history;
};

/// A safeguard configured to abort has tripped.
struct SafeguardAbort : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace chemochip
