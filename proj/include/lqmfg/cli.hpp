#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "lqmfg/model.hpp"
#include "lqmfg/riccati.hpp"

namespace lqmfg::cli {

inline constexpr const char* kToolVersion = "0.1.0";

enum ExitCode : int {
  kOk = 0,
  kInternalError = 1,
  kConfigError = 2,
  kSolverError = 3,
  kDivergence = 4,
  kIoError = 5,
};

/// Model, grid and seed pulled out of a config document.
struct LoadedConfig {
  nlohmann::json document;  // effective config after flag overrides
  CoefficientSet coeffs;
  TimeGrid grid{1.0, 2};
  InitialLaw initial = InitialLaw::point(0.0);
  std::uint64_t seed = 0;
  SolverOptions solver;
};

/// Throws ConfigurationError for missing or ill-typed keys.
LoadedConfig interpret_config(const nlohmann::json& document);

/// Content hash of the key-sorted compact serialization.
std::string config_fingerprint(const nlohmann::json& document);

/// Runs one subcommand; `args` excludes the program name.
int run(const std::vector<std::string>& args);
int run(int argc, char** argv);

}  // namespace lqmfg::cli
