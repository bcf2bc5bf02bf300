#include "lqmfg/sim.hpp"

#include <algorithm>
#include <cmath>

#include "lqmfg/error.hpp"
#include "lqmfg/parallel.hpp"
#include "lqmfg/rng.hpp"
#include "lqmfg/stats.hpp"

namespace lqmfg {

namespace {

inline double euler_step(const CoefficientValues& c, double x, double u, double dt, double dw) {
  return x + (c.A * x + c.B * u + c.f) * dt + (c.C * x + c.D * u + c.g) * dw;
}

void check_law_grid(const StrategyLaw& law, const TimeGrid& grid) {
  if (!(law.grid == grid) || law.k_self.size() != grid.size() ||
      law.k_mean.size() != grid.size() || law.k_const.size() != grid.size()) {
    throw ConfigurationError("strategy law is not sampled on the simulation grid");
  }
  if (law.mean_source == MeanSource::precomputed && law.mean_path.size() != grid.size()) {
    throw ConfigurationError("strategy law has no mean-field samples on the simulation grid");
  }
}

// Steps generated per refill of the per-agent noise buffer.
constexpr std::size_t kNoiseChunk = 128;

}  // namespace

std::size_t PathSet::row_of(std::size_t agent) const {
  const auto it = std::find(recorded_agents.begin(), recorded_agents.end(), agent);
  if (it == recorded_agents.end()) {
    throw OutOfRangeError("agent " + std::to_string(agent) + " is not recorded in replication " +
                          std::to_string(replication));
  }
  return static_cast<std::size_t>(it - recorded_agents.begin());
}

std::span<const double> PathSet::state(std::size_t agent) const {
  return std::span<const double>(states).subspan(row_of(agent) * (steps + 1), steps + 1);
}

std::span<const double> PathSet::control(std::size_t agent) const {
  return std::span<const double>(controls).subspan(row_of(agent) * steps, steps);
}

std::span<const double> PathSet::increment(std::size_t agent) const {
  return std::span<const double>(increments).subspan(row_of(agent) * steps, steps);
}

double draw_initial_state(const PopulationConfig& cfg, std::size_t replication,
                          std::size_t agent) {
  const RandomStream stream(cfg.master_seed, replication, agent, StreamPurpose::initial_state);
  return cfg.initial.sample(stream.uniform(0), stream.normal(0));
}

PathSet simulate_replication(const CoefficientSet& coeffs, const StrategyLaw& law,
                             const PopulationConfig& cfg, const TimeGrid& grid,
                             std::size_t replication,
                             const std::optional<std::vector<std::size_t>>& record) {
  if (cfg.agents < 1) throw ConfigurationError("population needs at least one agent");
  if (cfg.noise_substeps < 1) throw ConfigurationError("noise_substeps must be >= 1");
  check_law_grid(law, grid);

  const std::size_t n = cfg.agents;
  const std::size_t steps = grid.steps();
  const std::size_t sub = cfg.noise_substeps;
  const double dt = grid.dt();
  const double sub_scale = std::sqrt(dt / static_cast<double>(sub));

  PathSet out;
  out.replication = replication;
  out.agents = n;
  out.steps = steps;
  if (record) {
    out.recorded_agents = *record;
    for (auto a : out.recorded_agents) {
      if (a >= n) throw OutOfRangeError("recorded agent index " + std::to_string(a) +
                                        " >= N=" + std::to_string(n));
    }
  } else {
    out.recorded_agents.resize(n);
    for (std::size_t i = 0; i < n; ++i) out.recorded_agents[i] = i;
  }
  const std::size_t rows = out.recorded_agents.size();
  out.states.assign(rows * (steps + 1), 0.0);
  out.controls.assign(rows * steps, 0.0);
  out.increments.assign(rows * steps, 0.0);
  out.average.assign(steps + 1, 0.0);

  constexpr std::size_t kNone = static_cast<std::size_t>(-1);
  std::vector<std::size_t> row_index(n, kNone);
  for (std::size_t r = 0; r < rows; ++r) row_index[out.recorded_agents[r]] = r;

  std::vector<RandomStream> streams;
  streams.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    streams.emplace_back(cfg.master_seed, replication, i, StreamPurpose::brownian);
  }

  std::vector<double> x(n);
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    x[i] = draw_initial_state(cfg, replication, i);
    sum += x[i];
    if (row_index[i] != kNone) out.states[row_index[i] * (steps + 1)] = x[i];
  }
  out.average[0] = sum / static_cast<double>(n);

  std::vector<double> noise(n * kNoiseChunk * sub);
  for (std::size_t k0 = 0; k0 < steps; k0 += kNoiseChunk) {
    const std::size_t chunk = std::min(kNoiseChunk, steps - k0);
    for (std::size_t i = 0; i < n; ++i) {
      streams[i].fill_normal(std::span<double>(noise).subspan(i * kNoiseChunk * sub, chunk * sub),
                             k0 * sub);
    }
    for (std::size_t k = k0; k < k0 + chunk; ++k) {
      const auto c = coeffs.at_node(grid, k);
      const double realized = out.average[k];
      sum = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        const double* z = &noise[i * kNoiseChunk * sub + (k - k0) * sub];
        double dw = 0.0;
        for (std::size_t s = 0; s < sub; ++s) dw += z[s];
        dw *= sub_scale;
        const double u = law.control(k, x[i], realized);
        const double next = euler_step(c, x[i], u, dt, dw);
        if (!std::isfinite(next)) throw SimulationDivergedError(replication, i, k + 1);
        if (const auto r = row_index[i]; r != kNone) {
          out.controls[r * steps + k] = u;
          out.increments[r * steps + k] = dw;
          out.states[r * (steps + 1) + k + 1] = next;
        }
        x[i] = next;
        sum += next;
      }
      out.average[k + 1] = sum / static_cast<double>(n);
    }
  }
  return out;
}

std::vector<PathSet> simulate(const CoefficientSet& coeffs, const StrategyLaw& law,
                              const PopulationConfig& cfg, const TimeGrid& grid,
                              const SimOptions& opts) {
  if (cfg.replications < 1) throw ConfigurationError("replication count must be >= 1");
  std::vector<PathSet> out(cfg.replications);
  parallel_for(cfg.replications, opts.workers, [&](std::size_t rep) {
    out[rep] = simulate_replication(coeffs, law, cfg, grid, rep);
  });
  return out;
}

double path_cost(std::span<const double> state, std::span<const double> control,
                 std::span<const double> average, const CoefficientSet& coeffs,
                 const TimeGrid& grid) {
  const std::size_t steps = grid.steps();
  if (state.size() != steps + 1 || average.size() != steps + 1 || control.size() != steps) {
    throw ConfigurationError("path is not sampled on the cost grid");
  }
  const double dt = grid.dt();
  double tracking = 0.0;
  double effort = 0.0;
  for (std::size_t k = 0; k <= steps; ++k) {
    const double Q = coeffs.Q.at_node(grid, k);
    const double e = state[k] - coeffs.Gamma.at_node(grid, k) * average[k] -
                     coeffs.eta.at_node(grid, k);
    const double w = (k == 0 || k == steps) ? 0.5 * dt : dt;
    tracking += w * Q * e * e;
    if (k < steps) effort += dt * coeffs.R.at_node(grid, k) * control[k] * control[k];
  }
  const double e_T = state[steps] - coeffs.Gamma0 * average[steps] - coeffs.eta0;
  return 0.5 * (tracking + effort + coeffs.H * e_T * e_T);
}

CostReport evaluate_cost(std::size_t agent, std::span<const PathSet> paths,
                         const CoefficientSet& coeffs, const TimeGrid& grid) {
  if (paths.empty()) throw ConfigurationError("cost evaluation needs at least one replication");
  if (agent >= paths.front().agents) {
    throw OutOfRangeError("agent index " + std::to_string(agent) + " out of range (N=" +
                          std::to_string(paths.front().agents) + ")");
  }
  CostReport report;
  report.agent = agent;
  std::vector<double> population;
  for (const auto& p : paths) {
    report.per_replication.push_back(
        path_cost(p.state(agent), p.control(agent), p.average, coeffs, grid));
    double total = 0.0;
    for (auto a : p.recorded_agents) {
      total += path_cost(p.state(a), p.control(a), p.average, coeffs, grid);
    }
    population.push_back(total / static_cast<double>(p.recorded_agents.size()));
  }
  const auto own = summarize(report.per_replication);
  report.mean = own.mean;
  report.standard_error = own.standard_error;
  const auto pop = summarize(population);
  report.population_mean = pop.mean;
  report.population_standard_error = pop.standard_error;
  return report;
}

AdjointCheckReport stationarity_residual(std::span<const PathSet> paths,
                                         const RiccatiSolution& finite_solution,
                                         const GainSchedule& finite_gains,
                                         const CoefficientSet& coeffs) {
  if (finite_solution.regime.is_limit() || !(finite_solution.regime == finite_gains.regime)) {
    throw ConfigurationError("stationarity check needs matching finite-N solution and gains");
  }
  const auto& grid = finite_solution.grid;
  const double inv_n = finite_solution.regime.inverse_population();
  AdjointCheckReport report;
  for (const auto& p : paths) {
    if (static_cast<std::int64_t>(p.agents) != finite_solution.regime.population()) {
      throw ConfigurationError("paths have N=" + std::to_string(p.agents) +
                               " but the Riccati solution is " +
                               finite_solution.regime.describe());
    }
    if (p.steps != grid.steps()) {
      throw ConfigurationError("paths and Riccati solution use different grids");
    }
    for (auto a : p.recorded_agents) {
      const auto x = p.state(a);
      const auto u = p.control(a);
      for (std::size_t k = 0; k < p.steps; ++k) {
        const auto c = coeffs.at_node(grid, k);
        const double P = finite_solution.P[k];
        const double K = finite_solution.K[k];
        const double adjoint = P * x[k] + K * p.average[k] + finite_solution.phi[k];
        const double adjoint_diffusion = (P + inv_n * K) * (c.C * x[k] + c.D * u[k] + c.g);
        const double r = std::fabs(c.B * adjoint + c.D * adjoint_diffusion + c.R * u[k]);
        report.max_abs = std::max(report.max_abs, r);
        report.max_relative =
            std::max(report.max_relative, r / std::max(std::fabs(c.R * u[k]), 1.0));
      }
    }
  }
  return report;
}

ConvexityProbeResult convexity_probe(const CoefficientSet& coeffs, std::int64_t population,
                                     const TimeGrid& grid, const ConvexityProbeOptions& opts) {
  if (opts.samples < 1 || opts.inner < 1) {
    throw ConfigurationError("convexity probe needs samples >= 1 and inner >= 1");
  }
  const double inv_n = Regime::finite(population).inverse_population();
  const std::size_t steps = grid.steps();
  const double dt = grid.dt();
  const double sqrt_dt = std::sqrt(dt);
  const double terminal_scale = (1.0 - coeffs.Gamma0 * inv_n) * (1.0 - coeffs.Gamma0 * inv_n);

  ConvexityProbeResult result;
  result.sample_means.resize(opts.samples);
  result.sample_standard_errors.resize(opts.samples);

  parallel_for(opts.samples, opts.workers, [&](std::size_t s) {
    std::vector<double> u(steps);
    RandomStream(opts.seed, s, 0, StreamPurpose::probe_control).fill_normal(u);
    std::vector<double> values(opts.inner);
    std::vector<double> z(steps);
    for (std::size_t r = 0; r < opts.inner; ++r) {
      RandomStream(opts.seed, s, r, StreamPurpose::probe_noise).fill_normal(z);
      double x = 0.0;
      double integral = 0.0;
      for (std::size_t k = 0; k < steps; ++k) {
        const auto c = coeffs.at_node(grid, k);
        const double w = 1.0 - c.Gamma * inv_n;
        const double state_term = c.Q * w * w * x * x;
        integral += (k == 0 ? 0.5 : 1.0) * dt * state_term + dt * c.R * u[k] * u[k];
        x = x + (c.A * x + c.B * u[k]) * dt + (c.C * x + c.D * u[k]) * sqrt_dt * z[k];
        if (!std::isfinite(x)) throw SimulationDivergedError(s, r, k + 1);
      }
      const auto c_T = coeffs.at_node(grid, steps);
      const double w_T = 1.0 - c_T.Gamma * inv_n;
      integral += 0.5 * dt * c_T.Q * w_T * w_T * x * x;
      values[r] = integral + coeffs.H * terminal_scale * x * x;
    }
    const auto summary = summarize(values);
    result.sample_means[s] = summary.mean;
    result.sample_standard_errors[s] = summary.standard_error;
  });

  const auto it = std::min_element(result.sample_means.begin(), result.sample_means.end());
  result.argmin = static_cast<std::size_t>(it - result.sample_means.begin());
  result.min_value = *it;
  result.min_standard_error = result.sample_standard_errors[result.argmin];
  return result;
}

DeviationPath simulate_deviation(const CoefficientSet& coeffs, const PathSet& base,
                                 const StrategyLaw& base_law, std::size_t agent,
                                 const StrategyLaw& deviation, const TimeGrid& grid) {
  if (base_law.mean_source != MeanSource::precomputed) {
    throw ConfigurationError(
        "deviation replay needs a base law with a precomputed mean; the other agents would "
        "react to the deviator otherwise");
  }
  check_law_grid(deviation, grid);
  if (base.steps != grid.steps()) throw ConfigurationError("base paths use a different grid");

  const auto x_hat = base.state(agent);
  const auto dw = base.increment(agent);
  const double inv_n = 1.0 / static_cast<double>(base.agents);
  const double dt = grid.dt();

  DeviationPath out;
  out.agent = agent;
  out.states.resize(grid.size());
  out.controls.resize(grid.steps());
  out.average.resize(grid.size());
  out.states[0] = x_hat[0];
  out.average[0] = base.average[0];
  for (std::size_t k = 0; k < grid.steps(); ++k) {
    const double x = out.states[k];
    const double u = deviation.control(k, x, out.average[k]);
    const double next = euler_step(coeffs.at_node(grid, k), x, u, dt, dw[k]);
    if (!std::isfinite(next)) throw SimulationDivergedError(base.replication, agent, k + 1);
    out.controls[k] = u;
    out.states[k + 1] = next;
    out.average[k + 1] = base.average[k + 1] + (next - x_hat[k + 1]) * inv_n;
  }
  return out;
}

CostDecomposition decompose_cost(const CoefficientSet& coeffs, const PathSet& base,
                                 const DeviationPath& deviation, const TimeGrid& grid) {
  const std::size_t agent = deviation.agent;
  const auto x_hat = base.state(agent);
  const auto u_hat = base.control(agent);
  const auto& m_hat = base.average;
  const double inv_n = 1.0 / static_cast<double>(base.agents);
  const std::size_t steps = grid.steps();
  const double dt = grid.dt();

  CostDecomposition d;
  d.deviated = path_cost(deviation.states, deviation.controls, deviation.average, coeffs, grid);
  d.baseline = path_cost(x_hat, u_hat, m_hat, coeffs, grid);

  double quadratic = 0.0;
  double cross = 0.0;
  for (std::size_t k = 0; k < steps; ++k) {
    const auto c = coeffs.at_node(grid, k);
    const double w = 1.0 - c.Gamma * inv_n;
    const double x_tilde = deviation.states[k] - x_hat[k];
    const double u_tilde = deviation.controls[k] - u_hat[k];
    const double e_hat = x_hat[k] - c.Gamma * m_hat[k] - c.eta;
    quadratic += (c.Q * w * w * x_tilde * x_tilde + c.R * u_tilde * u_tilde) * dt;
    cross += (c.Q * w * x_tilde * e_hat + c.R * u_tilde * u_hat[k]) * dt;
  }
  const double w_T = 1.0 - coeffs.Gamma0 * inv_n;
  const double x_tilde_T = deviation.states[steps] - x_hat[steps];
  const double e_hat_T = x_hat[steps] - coeffs.Gamma0 * m_hat[steps] - coeffs.eta0;
  d.perturbation = 0.5 * (quadratic + coeffs.H * w_T * w_T * x_tilde_T * x_tilde_T);
  d.cross = cross + w_T * coeffs.H * x_tilde_T * e_hat_T;
  d.residual = d.deviated - d.baseline - d.perturbation - d.cross;
  return d;
}

}  // namespace lqmfg
