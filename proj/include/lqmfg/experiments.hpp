#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "lqmfg/model.hpp"
#include "lqmfg/riccati.hpp"
#include "lqmfg/sim.hpp"
#include "lqmfg/stats.hpp"
#include "lqmfg/synthesis.hpp"
#include "lqmfg/table.hpp"

namespace lqmfg {

/// Coefficients, horizon and initial law of the reference example: every
/// coefficient equal to one, T = 10, initial states uniform on [0, 20].
struct ReferenceExample {
  CoefficientSet coeffs = CoefficientSet::uniform(1.0);
  double horizon = 10.0;
  InitialLaw initial = InitialLaw::uniform(0.0, 20.0);
};

/// Stable content hash of a coefficient set.
std::string fingerprint(const CoefficientSet& coeffs);

struct ExperimentOptions {
  SolverOptions solver{};
  std::size_t workers = 0;
};

/// Table schemas shared by the CLI and the Python bindings.
ExperimentTable riccati_table(const RiccatiSolution& sol, const GainSchedule& gains);
ExperimentTable mean_field_table(const MeanFieldPath& path);
ExperimentTable law_table(const StrategyLaw& law);
ExperimentTable paths_table(const PathSet& paths, const TimeGrid& grid);

/// Integral over the grid of (x^(N) - x̄)^2 by the trapezoid rule.
double squared_mean_field_error(std::span<const double> average, std::span<const double> xbar,
                                const TimeGrid& grid);

struct PopulationCostResult {
  /// Columns: agent, mean_cost, stderr (over replications).
  ExperimentTable summary;
  double population_mean = 0.0;
  double population_standard_error = 0.0;
  /// Full path sets in replication order when requested, else empty.
  std::vector<PathSet> paths;
};

/// Simulates every replication under `law` and reduces each agent's cost.
PopulationCostResult population_costs(const CoefficientSet& coeffs, const StrategyLaw& law,
                                      const PopulationConfig& cfg, const TimeGrid& grid,
                                      bool keep_paths, const ExperimentOptions& opts = {});

struct EpsilonSweepResult {
  /// Columns: N, epsilon, stderr, N_epsilon_sq.
  ExperimentTable table;
  /// Least-squares fit of log epsilon against log N.
  LineFit slope;
};

/// epsilon(N) = (E int (x^(N) - x̄)^2 dt)^(1/2) for decentralized populations.
/// Agent j's noise depends only on (seed, replication, j), so the sizes share
/// their leading agents' randomness.
EpsilonSweepResult epsilon_sweep(const CoefficientSet& coeffs, const InitialLaw& initial,
                                 const std::vector<std::int64_t>& populations,
                                 std::size_t replications, std::uint64_t master_seed,
                                 const TimeGrid& grid, const ExperimentOptions& opts = {});

struct RiccatiConvergenceResult {
  /// Columns: N, err_P, err_K, err_phi (sup over nodes vs the limit); the
  /// last row is the N = inf sentinel (limit against itself).
  ExperimentTable table;
  LineFit slope_P, slope_K, slope_phi;  // log error against log N
};

RiccatiConvergenceResult riccati_convergence(const CoefficientSet& coeffs,
                                             const std::vector<std::int64_t>& populations,
                                             const TimeGrid& grid,
                                             const ExperimentOptions& opts = {});

struct Deviation {
  LawKind kind = LawKind::scaled;
  double theta = 1.0;
  std::string label() const;
};

/// zero, scaled(0.25 .. 1.5), meanfield-informed, centralized.
std::vector<Deviation> default_deviation_family();

struct NashGapResult {
  /// Columns: N, deviation, gap, stderr. First row is the scaled(1)
  /// calibration arm; gap = J_1(û) - J_1(deviation), paired per replication.
  ExperimentTable table;
  double max_gap = 0.0;  // max(0, max over deviations of mean gap)
  double max_gap_standard_error = 0.0;
  std::string max_gap_deviation;  // label of the maximizing arm ("none" if all gaps <= 0)
  double calibration_gap = 0.0;
};

/// Agent 0 deviates while agents 1..N-1 keep the decentralized law; every
/// arm reuses the same initial states and noise.
NashGapResult nash_gap(const CoefficientSet& coeffs, const InitialLaw& initial,
                       std::int64_t population, const std::vector<Deviation>& family,
                       std::size_t replications, std::uint64_t master_seed,
                       const TimeGrid& grid, const ExperimentOptions& opts = {});

/// Writes fig1.csv (t, P, K), fig2.csv (N, epsilon, stderr) and a gnuplot
/// script per figure. Returns the written paths.
std::vector<std::filesystem::path> figure_data(const RiccatiSolution& limit_solution,
                                               const ExperimentTable& sweep,
                                               const std::filesystem::path& out_dir);

}  // namespace lqmfg
