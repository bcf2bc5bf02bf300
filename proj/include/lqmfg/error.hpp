#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace lqmfg {

/// Base for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad or inconsistent user configuration (kind/gain mismatch, bad flags, missing keys).
class ConfigurationError : public Error {
 public:
  using Error::Error;
};

/// A coefficient profile holds a non-finite value or is misaligned with the grid.
class MalformedModelError : public ConfigurationError {
 public:
  using ConfigurationError::ConfigurationError;
};

class OutOfRangeError : public ConfigurationError {
 public:
  using ConfigurationError::ConfigurationError;
};

/// Base for failures of the Riccati / mean-field integrators.
class SolverError : public Error {
 public:
  SolverError(const std::string& what, double time) : Error(what), time_(time) {}
  double time() const noexcept { return time_; }

 private:
  double time_;
};

/// |alpha| fell below the configured threshold.
class SingularGainError : public SolverError {
 public:
  using SolverError::SolverError;
};

/// A solution component exceeded the blow-up bound or became non-finite.
class NonSolvableError : public SolverError {
 public:
  using SolverError::SolverError;
};

class SimulationDivergedError : public Error {
 public:
  SimulationDivergedError(std::size_t replication, std::size_t agent, std::size_t step)
      : Error("simulation diverged: replication " + std::to_string(replication) + ", agent " +
              std::to_string(agent) + ", step " + std::to_string(step)),
        replication_(replication),
        agent_(agent),
        step_(step) {}

  std::size_t replication() const noexcept { return replication_; }
  std::size_t agent() const noexcept { return agent_; }
  std::size_t step() const noexcept { return step_; }

 private:
  std::size_t replication_;
  std::size_t agent_;
  std::size_t step_;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace lqmfg
