#include "lqmfg/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "lqmfg/error.hpp"
#include "lqmfg/parallel.hpp"

namespace lqmfg {

namespace {

std::string profile_text(const TimeProfile& p) {
  if (p.is_constant()) return format_double(p.constant_value());
  std::string s = "[";
  for (double v : p.samples()) s += format_double(v) + ",";
  return s + "]";
}

double sup_difference(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::fabs(a[i] - b[i]));
  return m;
}

void require_increasing(const std::vector<std::int64_t>& ns) {
  if (ns.empty()) throw ConfigurationError("population list is empty");
  for (std::size_t i = 0; i < ns.size(); ++i) {
    if (ns[i] < 1) throw ConfigurationError("population sizes must be >= 1");
    if (i > 0 && ns[i] <= ns[i - 1]) {
      throw ConfigurationError("population sizes must be strictly increasing");
    }
  }
}

void set_grid_meta(ExperimentTable& t, const TimeGrid& grid) {
  t.set_meta("T", format_double(grid.horizon()));
  t.set_meta("M", std::to_string(grid.steps()));
}

LineFit log_log_fit(const std::vector<double>& xs, const std::vector<double>& ys) {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  if (xs.size() < 2) return {nan, nan, nan};
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (!(xs[i] > 0.0 && ys[i] > 0.0)) return {nan, nan, nan};
    lx.push_back(std::log(xs[i]));
    ly.push_back(std::log(ys[i]));
  }
  return fit_line(lx, ly);
}

struct LimitPieces {
  RiccatiSolution solution;
  GainSchedule schedule;
  MeanFieldPath mean_field;
  StrategyLaw law;
};

LimitPieces decentralized_setup(const CoefficientSet& coeffs, const InitialLaw& initial,
                                const TimeGrid& grid, const SolverOptions& solver) {
  LimitPieces out;
  out.solution = solve_limit(coeffs, grid, solver);
  out.schedule = gains(out.solution, coeffs, solver);
  out.mean_field = solve_mean_field(coeffs, out.schedule, initial.mean(), grid);
  out.law = make_law(LawKind::decentralized, out.schedule, out.mean_field);
  return out;
}

}  // namespace

std::string fingerprint(const CoefficientSet& c) {
  std::ostringstream os;
  os << "A=" << profile_text(c.A) << ";B=" << profile_text(c.B) << ";C=" << profile_text(c.C)
     << ";D=" << profile_text(c.D) << ";f=" << profile_text(c.f) << ";g=" << profile_text(c.g)
     << ";Q=" << profile_text(c.Q) << ";R=" << profile_text(c.R)
     << ";Gamma=" << profile_text(c.Gamma) << ";eta=" << profile_text(c.eta)
     << ";H=" << format_double(c.H) << ";Gamma0=" << format_double(c.Gamma0)
     << ";eta0=" << format_double(c.eta0);
  return fnv1a_hex(os.str());
}

ExperimentTable riccati_table(const RiccatiSolution& sol, const GainSchedule& g) {
  if (!(sol.regime == g.regime) || !(sol.grid == g.grid)) {
    throw ConfigurationError("Riccati solution and gain schedule do not match");
  }
  ExperimentTable t;
  t.id = sol.regime.is_limit() ? "riccati_limit"
                               : "riccati_N" + std::to_string(sol.regime.population());
  t.columns = {"t", "P", "K", "phi", "alpha", "beta", "gamma", "delta"};
  if (!sol.regime.is_limit()) t.columns.emplace_back("N");
  for (std::size_t k = 0; k < sol.grid.size(); ++k) {
    std::vector<Cell> row{sol.grid.node(k), sol.P[k],    sol.K[k],     sol.phi[k],
                          g.alpha[k],       g.beta[k],   g.gamma[k],   g.delta[k]};
    if (!sol.regime.is_limit()) row.emplace_back(sol.regime.population());
    t.add_row(std::move(row));
  }
  set_grid_meta(t, sol.grid);
  t.set_meta("regime", sol.regime.describe());
  return t;
}

ExperimentTable mean_field_table(const MeanFieldPath& path) {
  ExperimentTable t;
  t.id = "mean_field";
  t.columns = {"t", "xbar"};
  for (std::size_t k = 0; k < path.grid.size(); ++k) {
    t.add_row({path.grid.node(k), path.values[k]});
  }
  set_grid_meta(t, path.grid);
  return t;
}

ExperimentTable law_table(const StrategyLaw& law) {
  ExperimentTable t;
  t.id = "law";
  t.columns = {"t", "k_self", "k_mean", "k_const", "kind", "mean_source"};
  std::string kind = to_string(law.kind);
  if (law.kind == LawKind::scaled) kind += "(" + format_double(law.theta) + ")";
  const std::string source = to_string(law.mean_source);
  for (std::size_t k = 0; k < law.grid.size(); ++k) {
    t.add_row({law.grid.node(k), law.k_self[k], law.k_mean[k], law.k_const[k], kind, source});
  }
  set_grid_meta(t, law.grid);
  return t;
}

ExperimentTable paths_table(const PathSet& paths, const TimeGrid& grid) {
  ExperimentTable t;
  t.id = "paths_rep" + std::to_string(paths.replication);
  t.columns = {"t"};
  for (auto a : paths.recorded_agents) t.columns.push_back("x" + std::to_string(a));
  const std::size_t stride = paths.steps + 1;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    std::vector<Cell> row{grid.node(k)};
    for (std::size_t r = 0; r < paths.recorded_agents.size(); ++r) {
      row.emplace_back(paths.states[r * stride + k]);
    }
    t.add_row(std::move(row));
  }
  set_grid_meta(t, grid);
  return t;
}

double squared_mean_field_error(std::span<const double> average, std::span<const double> xbar,
                                const TimeGrid& grid) {
  if (average.size() != grid.size() || xbar.size() != grid.size()) {
    throw ConfigurationError("mean-field error needs both paths on the grid");
  }
  double acc = 0.0;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const double d = average[k] - xbar[k];
    acc += (k == 0 || k == grid.steps() ? 0.5 : 1.0) * d * d;
  }
  return acc * grid.dt();
}

PopulationCostResult population_costs(const CoefficientSet& coeffs, const StrategyLaw& law,
                                      const PopulationConfig& cfg, const TimeGrid& grid,
                                      bool keep_paths, const ExperimentOptions& opts) {
  if (cfg.replications < 1) throw ConfigurationError("replication count must be >= 1");
  const std::size_t n = cfg.agents;
  const std::size_t reps = cfg.replications;
  std::vector<double> costs(reps * n);
  PopulationCostResult out;
  if (keep_paths) out.paths.resize(reps);
  parallel_for(reps, opts.workers, [&](std::size_t rep) {
    auto paths = simulate_replication(coeffs, law, cfg, grid, rep);
    for (std::size_t a = 0; a < n; ++a) {
      costs[rep * n + a] =
          path_cost(paths.state(a), paths.control(a), paths.average, coeffs, grid);
    }
    if (keep_paths) out.paths[rep] = std::move(paths);
  });

  auto& t = out.summary;
  t.id = "simulate_summary";
  t.columns = {"agent", "mean_cost", "stderr"};
  std::vector<double> column(reps);
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t r = 0; r < reps; ++r) column[r] = costs[r * n + a];
    const auto s = summarize(column);
    t.add_row({static_cast<std::int64_t>(a), s.mean, s.standard_error});
  }
  // Replication-level population averages are independent across replications.
  std::vector<double> per_rep(reps, 0.0);
  for (std::size_t r = 0; r < reps; ++r) {
    for (std::size_t a = 0; a < n; ++a) per_rep[r] += costs[r * n + a];
    per_rep[r] /= static_cast<double>(n);
  }
  const auto pop = summarize(per_rep);
  out.population_mean = pop.mean;
  out.population_standard_error = pop.standard_error;
  t.set_meta("experiment", "simulate");
  t.set_meta("seed", std::to_string(cfg.master_seed));
  set_grid_meta(t, grid);
  t.set_meta("replications", std::to_string(reps));
  t.set_meta("coefficients", fingerprint(coeffs));
  return out;
}

EpsilonSweepResult epsilon_sweep(const CoefficientSet& coeffs, const InitialLaw& initial,
                                 const std::vector<std::int64_t>& populations,
                                 std::size_t replications, std::uint64_t master_seed,
                                 const TimeGrid& grid, const ExperimentOptions& opts) {
  require_increasing(populations);
  if (replications < 1) throw ConfigurationError("replication count must be >= 1");
  const auto setup = decentralized_setup(coeffs, initial, grid, opts.solver);

  const std::size_t points = populations.size();
  std::vector<double> errors(points * replications);
  const std::vector<std::size_t> no_rows;
  parallel_for(points * replications, opts.workers, [&](std::size_t unit) {
    const std::size_t p = unit / replications;
    const std::size_t rep = unit % replications;
    PopulationConfig cfg;
    cfg.agents = static_cast<std::size_t>(populations[p]);
    cfg.replications = replications;
    cfg.master_seed = master_seed;
    cfg.initial = initial;
    const auto paths = simulate_replication(coeffs, setup.law, cfg, grid, rep, no_rows);
    errors[unit] = squared_mean_field_error(paths.average, setup.mean_field.values, grid);
  });

  EpsilonSweepResult out;
  auto& t = out.table;
  t.id = "epsilon_sweep";
  t.columns = {"N", "epsilon", "stderr", "N_epsilon_sq"};
  std::vector<double> ns, eps;
  for (std::size_t p = 0; p < points; ++p) {
    const auto s = summarize(std::span<const double>(errors).subspan(p * replications,
                                                                     replications));
    const double epsilon = std::sqrt(s.mean);
    const double se = epsilon > 0.0 ? s.standard_error / (2.0 * epsilon) : 0.0;
    const double n = static_cast<double>(populations[p]);
    t.add_row({populations[p], epsilon, se, n * s.mean});
    ns.push_back(n);
    eps.push_back(epsilon);
  }
  out.slope = log_log_fit(ns, eps);
  t.set_meta("experiment", "epsilon_sweep");
  t.set_meta("seed", std::to_string(master_seed));
  set_grid_meta(t, grid);
  t.set_meta("replications", std::to_string(replications));
  t.set_meta("coefficients", fingerprint(coeffs));
  t.set_meta("initial", initial.describe());
  t.set_meta("slope", format_double(out.slope.slope));
  t.set_meta("slope_stderr", format_double(out.slope.slope_standard_error));
  return out;
}

RiccatiConvergenceResult riccati_convergence(const CoefficientSet& coeffs,
                                             const std::vector<std::int64_t>& populations,
                                             const TimeGrid& grid,
                                             const ExperimentOptions& opts) {
  require_increasing(populations);
  const auto limit = solve_limit(coeffs, grid, opts.solver);

  std::vector<RiccatiSolution> finite(populations.size());
  parallel_for(populations.size(), opts.workers, [&](std::size_t i) {
    finite[i] = solve_finite_n(coeffs, populations[i], grid, opts.solver);
  });

  RiccatiConvergenceResult out;
  auto& t = out.table;
  t.id = "riccati_convergence";
  t.columns = {"N", "err_P", "err_K", "err_phi"};
  std::vector<double> ns, eP, eK, ePhi;
  for (std::size_t i = 0; i < populations.size(); ++i) {
    const double p = sup_difference(finite[i].P, limit.P);
    const double k = sup_difference(finite[i].K, limit.K);
    const double f = sup_difference(finite[i].phi, limit.phi);
    t.add_row({populations[i], p, k, f});
    ns.push_back(static_cast<double>(populations[i]));
    eP.push_back(p);
    eK.push_back(k);
    ePhi.push_back(f);
  }
  t.add_row({std::string("inf"), sup_difference(limit.P, limit.P),
             sup_difference(limit.K, limit.K), sup_difference(limit.phi, limit.phi)});
  out.slope_P = log_log_fit(ns, eP);
  out.slope_K = log_log_fit(ns, eK);
  out.slope_phi = log_log_fit(ns, ePhi);
  t.set_meta("experiment", "riccati_convergence");
  set_grid_meta(t, grid);
  t.set_meta("coefficients", fingerprint(coeffs));
  t.set_meta("slope_P", format_double(out.slope_P.slope));
  t.set_meta("slope_K", format_double(out.slope_K.slope));
  t.set_meta("slope_phi", format_double(out.slope_phi.slope));
  return out;
}

std::string Deviation::label() const {
  if (kind == LawKind::scaled) return "scaled(" + format_double(theta) + ")";
  return to_string(kind);
}

std::vector<Deviation> default_deviation_family() {
  std::vector<Deviation> family{{LawKind::zero, 1.0}};
  for (double theta : {0.25, 0.5, 0.75, 1.25, 1.5}) family.push_back({LawKind::scaled, theta});
  family.push_back({LawKind::meanfield_informed, 1.0});
  family.push_back({LawKind::centralized, 1.0});
  return family;
}

NashGapResult nash_gap(const CoefficientSet& coeffs, const InitialLaw& initial,
                       std::int64_t population, const std::vector<Deviation>& family,
                       std::size_t replications, std::uint64_t master_seed,
                       const TimeGrid& grid, const ExperimentOptions& opts) {
  if (family.empty()) throw ConfigurationError("deviation family is empty");
  if (replications < 1) throw ConfigurationError("replication count must be >= 1");
  Regime::finite(population);
  const auto setup = decentralized_setup(coeffs, initial, grid, opts.solver);

  std::vector<Deviation> arms{{LawKind::scaled, 1.0}};
  arms.insert(arms.end(), family.begin(), family.end());

  std::vector<StrategyLaw> laws;
  for (const auto& d : arms) {
    if (d.kind == LawKind::centralized) {
      const auto fin = solve_finite_n(coeffs, population, grid, opts.solver);
      laws.push_back(make_law(d.kind, gains(fin, coeffs, opts.solver)));
    } else {
      laws.push_back(make_law(d.kind, setup.schedule, setup.mean_field, d.theta));
    }
  }

  const std::size_t n_arms = arms.size();
  std::vector<double> gaps(replications * n_arms);
  const std::vector<std::size_t> tracked{0};
  parallel_for(replications, opts.workers, [&](std::size_t rep) {
    PopulationConfig cfg;
    cfg.agents = static_cast<std::size_t>(population);
    cfg.replications = replications;
    cfg.master_seed = master_seed;
    cfg.initial = initial;
    const auto base = simulate_replication(coeffs, setup.law, cfg, grid, rep, tracked);
    const double baseline =
        path_cost(base.state(0), base.control(0), base.average, coeffs, grid);
    for (std::size_t a = 0; a < n_arms; ++a) {
      const auto dev = simulate_deviation(coeffs, base, setup.law, 0, laws[a], grid);
      const double cost = path_cost(dev.states, dev.controls, dev.average, coeffs, grid);
      gaps[rep * n_arms + a] = baseline - cost;
    }
  });

  NashGapResult out;
  auto& t = out.table;
  t.id = "nash_gap";
  t.columns = {"N", "deviation", "gap", "stderr"};
  double best = -std::numeric_limits<double>::infinity();
  std::vector<double> column(replications);
  for (std::size_t a = 0; a < n_arms; ++a) {
    for (std::size_t r = 0; r < replications; ++r) column[r] = gaps[r * n_arms + a];
    const auto s = summarize(column);
    t.add_row({population, arms[a].label(), s.mean, s.standard_error});
    if (a == 0) {
      out.calibration_gap = s.mean;
      continue;
    }
    if (s.mean > best) {
      best = s.mean;
      out.max_gap_standard_error = s.standard_error;
      out.max_gap_deviation = arms[a].label();
    }
  }
  if (best <= 0.0) out.max_gap_deviation = "none (best: " + out.max_gap_deviation + ")";
  out.max_gap = std::max(0.0, best);
  t.set_meta("experiment", "nash_gap");
  t.set_meta("seed", std::to_string(master_seed));
  set_grid_meta(t, grid);
  t.set_meta("replications", std::to_string(replications));
  t.set_meta("coefficients", fingerprint(coeffs));
  t.set_meta("initial", initial.describe());
  t.set_meta("max_gap", format_double(out.max_gap));
  return out;
}

std::vector<std::filesystem::path> figure_data(const RiccatiSolution& limit_solution,
                                               const ExperimentTable& sweep,
                                               const std::filesystem::path& out_dir) {
  if (!limit_solution.regime.is_limit()) {
    throw ConfigurationError("figure 1 needs the limit Riccati solution");
  }
  if (sweep.rows.empty()) {
    throw ConfigurationError(
        "figure 2 needs at least one epsilon-sweep row; run epsilon-sweep with a non-empty "
        "population list first");
  }
  const auto n_col = sweep.column_index("N");
  const auto e_col = sweep.column_index("epsilon");
  const auto s_col = sweep.column_index("stderr");

  ExperimentTable fig1;
  fig1.id = "fig1";
  fig1.columns = {"t", "P", "K"};
  for (std::size_t k = 0; k < limit_solution.grid.size(); ++k) {
    fig1.add_row({limit_solution.grid.node(k), limit_solution.P[k], limit_solution.K[k]});
  }
  ExperimentTable fig2;
  fig2.id = "fig2";
  fig2.columns = {"N", "epsilon", "stderr"};
  for (std::size_t r = 0; r < sweep.rows.size(); ++r) {
    fig2.add_row({sweep.rows[r][n_col], sweep.rows[r][e_col], sweep.rows[r][s_col]});
  }

  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create '" + out_dir.string() + "': " + ec.message());

  const std::string fig1_script =
      "set datafile separator ','\n"
      "set key autotitle columnhead\n"
      "set xlabel 't'\n"
      "set title 'P(t) and K(t)'\n"
      "set terminal pngcairo size 900,600\n"
      "set output 'fig1.png'\n"
      "plot 'fig1.csv' using 1:2 with lines, '' using 1:3 with lines\n";
  const std::string fig2_script =
      "set datafile separator ','\n"
      "set key autotitle columnhead\n"
      "set logscale xy\n"
      "set xlabel 'N'\n"
      "set ylabel 'epsilon(N)'\n"
      "set terminal pngcairo size 900,600\n"
      "set output 'fig2.png'\n"
      "plot 'fig2.csv' using 1:2:3 with yerrorlines\n";

  std::vector<std::filesystem::path> written{out_dir / "fig1.csv", out_dir / "fig1.gp",
                                             out_dir / "fig2.csv", out_dir / "fig2.gp"};
  write_csv(written[0], fig1);
  write_text(written[1], fig1_script);
  write_csv(written[2], fig2);
  write_text(written[3], fig2_script);
  return written;
}

}  // namespace lqmfg
