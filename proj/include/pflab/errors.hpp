#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace pflab {

// Numerical failures; the CLI maps these to exit code 3.
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct UnstableStep : NumericalError {
  using NumericalError::NumericalError;
};

struct SolverDiverged : NumericalError {
  std::vector<double> residual_history;
  SolverDiverged(const std::string& msg, std::vector<double> history)
      : NumericalError(msg), residual_history(std::move(history)) {}
};

struct SingularSystem : NumericalError {
  using NumericalError::NumericalError;
};

struct EmptyLevelSet : NumericalError {
  using NumericalError::NumericalError;
};

struct DegenerateFit : NumericalError {
  using NumericalError::NumericalError;
};

struct InterfaceExitedDomain : NumericalError {
  using NumericalError::NumericalError;
};

struct CircleVanished : NumericalError {
  using NumericalError::NumericalError;
};

struct TargetUnreachable : NumericalError {
  using NumericalError::NumericalError;
};

struct NoOracle : NumericalError {
  using NumericalError::NumericalError;
};

// Bad or missing configuration; the CLI maps this to exit code 2.
struct ConfigError : std::runtime_error {
  std::string key;
  explicit ConfigError(const std::string& msg, std::string key_ = "")
      : std::runtime_error(msg), key(std::move(key_)) {}
};

}  // namespace pflab
