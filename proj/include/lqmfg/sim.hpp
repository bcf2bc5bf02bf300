#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "lqmfg/model.hpp"
#include "lqmfg/riccati.hpp"
#include "lqmfg/synthesis.hpp"

namespace lqmfg {

struct PopulationConfig {
  std::size_t agents = 1;
  std::size_t replications = 1;
  std::uint64_t master_seed = 0;
  InitialLaw initial = InitialLaw::point(0.0);
  /// Each Brownian increment is the sum of this many sub-increments. A run
  /// at M steps with 2 substeps sees the same Brownian path as a run at 2M
  /// steps with 1 substep.
  std::size_t noise_substeps = 1;
};

struct SimOptions {
  std::size_t workers = 0;  // 0 = hardware concurrency
};

/// One replication of the population. Per-agent rows are stored only for
/// `recorded_agents`; the population average is always complete.
struct PathSet {
  std::size_t replication = 0;
  std::size_t agents = 0;
  std::size_t steps = 0;
  std::vector<std::size_t> recorded_agents;
  std::vector<double> states;      // rows x (steps + 1)
  std::vector<double> controls;    // rows x steps, left-endpoint
  std::vector<double> increments;  // rows x steps, Brownian increments
  std::vector<double> average;     // steps + 1, realized x^(N)

  /// Row index of `agent`; throws OutOfRangeError if it was not recorded.
  std::size_t row_of(std::size_t agent) const;
  std::span<const double> state(std::size_t agent) const;
  std::span<const double> control(std::size_t agent) const;
  std::span<const double> increment(std::size_t agent) const;
};

/// Draws x_i(0) for (seed, replication, agent).
double draw_initial_state(const PopulationConfig& cfg, std::size_t replication,
                          std::size_t agent);

/// Euler-Maruyama simulation of one replication. `record` selects the agents
/// whose rows are kept (nullopt = all).
PathSet simulate_replication(const CoefficientSet& coeffs, const StrategyLaw& law,
                             const PopulationConfig& cfg, const TimeGrid& grid,
                             std::size_t replication,
                             const std::optional<std::vector<std::size_t>>& record = std::nullopt);

/// All replications with every agent recorded; results in replication order.
std::vector<PathSet> simulate(const CoefficientSet& coeffs, const StrategyLaw& law,
                              const PopulationConfig& cfg, const TimeGrid& grid,
                              const SimOptions& opts = {});

/// Cost functional of one trajectory (own state, own control, population
/// average): trapezoid rule for the tracking term, left-endpoint rule for the
/// control term, plus the terminal penalty, times 1/2.
double path_cost(std::span<const double> state, std::span<const double> control,
                 std::span<const double> average, const CoefficientSet& coeffs,
                 const TimeGrid& grid);

struct CostReport {
  std::size_t agent = 0;
  std::vector<double> per_replication;  // J_i for each replication
  double mean = 0.0;                    // J_i averaged over replications
  double standard_error = 0.0;          // Monte Carlo standard error of `mean`
  double population_mean = 0.0;         // J averaged over recorded agents and replications
  double population_standard_error = 0.0;
};

CostReport evaluate_cost(std::size_t agent, std::span<const PathSet> paths,
                         const CoefficientSet& coeffs, const TimeGrid& grid);

struct AdjointCheckReport {
  double max_abs = 0.0;       // max |B p + D q + R u|
  double max_relative = 0.0;  // max |B p + D q + R u| / max(|R u|, 1)
};

/// Rebuilds p_i = P_N x_i + K_N x^(N) + phi_N and q_i^i = (P_N + K_N/N)(C x_i + D u_i + g)
/// along centralized paths and evaluates the stationarity residual.
AdjointCheckReport stationarity_residual(std::span<const PathSet> paths,
                                         const RiccatiSolution& finite_solution,
                                         const GainSchedule& finite_gains,
                                         const CoefficientSet& coeffs);

struct ConvexityProbeOptions {
  std::size_t samples = 32;
  std::size_t inner = 256;  // noise realizations per control sample
  std::uint64_t seed = 0;
  std::size_t workers = 0;
};

struct ConvexityProbeResult {
  double min_value = 0.0;
  double min_standard_error = 0.0;  // standard error of the minimizing sample's mean
  std::size_t argmin = 0;
  std::vector<double> sample_means;
  std::vector<double> sample_standard_errors;
};

/// Samples random piecewise-constant controls, simulates the homogeneous
/// perturbation dynamics from 0 and estimates the second-variation quadratic
/// form E{int [Q(1-Gamma/N)^2 x^2 + R u^2] dt + H(1-Gamma0/N)^2 x(T)^2}.
ConvexityProbeResult convexity_probe(const CoefficientSet& coeffs, std::int64_t population,
                                     const TimeGrid& grid, const ConvexityProbeOptions& opts);

/// Trajectory of one agent re-simulated under a deviation law while every
/// other agent keeps its recorded (decentralized) path.
struct DeviationPath {
  std::size_t agent = 0;
  std::vector<double> states;    // steps + 1
  std::vector<double> controls;  // steps
  std::vector<double> average;   // realized x^(N) including the deviator
};

/// Replays `agent` with the recorded initial state and Brownian increments.
/// The base law must use a precomputed mean so the others do not react.
DeviationPath simulate_deviation(const CoefficientSet& coeffs, const PathSet& base,
                                 const StrategyLaw& base_law, std::size_t agent,
                                 const StrategyLaw& deviation, const TimeGrid& grid);

/// J(u) = J(û) + J̃(ũ) + I split along one replication.
struct CostDecomposition {
  double deviated = 0.0;      // J_i(u, û_{-i}) by path_cost
  double baseline = 0.0;      // J_i(û) by path_cost
  double perturbation = 0.0;  // J̃: quadratic form in (x̃, ũ)
  double cross = 0.0;         // I: cross term
  double residual = 0.0;      // deviated - baseline - perturbation - cross
};

/// `perturbation` and `cross` are Ito (left-endpoint) sums of their
/// integrands, so they differ from the trapezoid-based path costs by a
/// quadrature error of order dt.
CostDecomposition decompose_cost(const CoefficientSet& coeffs, const PathSet& base,
                                 const DeviationPath& deviation, const TimeGrid& grid);

}  // namespace lqmfg
