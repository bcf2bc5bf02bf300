#include "lqmfg/cli.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "lqmfg/error.hpp"
#include "lqmfg/experiments.hpp"
#include "lqmfg/sim.hpp"
#include "lqmfg/synthesis.hpp"
#include "lqmfg/table.hpp"

namespace lqmfg::cli {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

const json& require(const json& obj, const std::string& key, const std::string& where) {
  if (!obj.is_object() || !obj.contains(key)) {
    throw ConfigurationError("config: missing '" + where + key + "'");
  }
  return obj.at(key);
}

double number(const json& obj, const std::string& key, const std::string& where) {
  const json& v = require(obj, key, where);
  if (!v.is_number()) throw ConfigurationError("config: '" + where + key + "' must be a number");
  return v.get<double>();
}

std::uint64_t count(const json& v, const std::string& name) {
  if (v.is_number_unsigned()) return v.get<std::uint64_t>();
  if (v.is_number_integer() && v.get<std::int64_t>() >= 0) {
    return static_cast<std::uint64_t>(v.get<std::int64_t>());
  }
  throw ConfigurationError("config: '" + name + "' must be a non-negative integer");
}

TimeProfile profile(const json& model, const std::string& key) {
  const json& v = require(model, key, "model.");
  if (v.is_number()) return v.get<double>();
  if (v.is_array()) {
    std::vector<double> samples;
    for (const auto& x : v) {
      if (!x.is_number()) {
        throw ConfigurationError("config: 'model." + key + "' must hold numbers only");
      }
      samples.push_back(x.get<double>());
    }
    return TimeProfile::sampled(std::move(samples));
  }
  throw ConfigurationError("config: 'model." + key + "' must be a number or an array");
}

InitialLaw initial_law(const json& v) {
  const std::string kind = require(v, "kind", "initial.").get<std::string>();
  if (kind == "uniform") {
    return InitialLaw::uniform(number(v, "lower", "initial."), number(v, "upper", "initial."));
  }
  if (kind == "gaussian") {
    return InitialLaw::gaussian(number(v, "mean", "initial."), number(v, "variance", "initial."));
  }
  if (kind == "point") return InitialLaw::point(number(v, "value", "initial."));
  throw ConfigurationError("config: unknown initial law '" + kind + "'");
}

json section(const json& doc, const std::string& name) {
  return doc.contains(name) ? doc.at(name) : json::object();
}

std::vector<std::int64_t> populations(const json& sec, const std::string& where) {
  const json& v = require(sec, "Ns", where);
  if (!v.is_array()) throw ConfigurationError("config: '" + where + "Ns' must be an array");
  std::vector<std::int64_t> out;
  for (const auto& x : v) out.push_back(static_cast<std::int64_t>(count(x, where + "Ns")));
  return out;
}

std::size_t replications(const json& sec, const std::string& where) {
  return static_cast<std::size_t>(count(require(sec, "reps", where), where + "reps"));
}

struct Run {
  LoadedConfig cfg;
  fs::path out_dir;
  ExperimentOptions opts;
  std::vector<std::string> outputs;
  json summary = json::object();

  void write(const std::string& name, const ExperimentTable& table) {
    write_csv(out_dir / name, table);
    outputs.push_back(name);
  }
};

std::string riccati_file(const Regime& r) {
  return r.is_limit() ? "riccati_limit.csv"
                      : "riccati_N" + std::to_string(r.population()) + ".csv";
}

void do_validate(Run& run) {
  const auto report = validate(run.cfg.coeffs, run.cfg.grid);
  std::cout << report.to_string() << "\n";
  run.summary["a3_holds"] = report.a3_holds();
  run.summary["indefinite_control_weight"] = report.indefinite_control_weight;
  run.summary["min_Q"] = report.min_Q;
  run.summary["min_R"] = report.min_R;
}

void do_solve_riccati(Run& run) {
  const auto& c = run.cfg;
  validate(c.coeffs, c.grid);
  const auto limit = solve_limit(c.coeffs, c.grid, c.solver);
  run.write(riccati_file(limit.regime), riccati_table(limit, gains(limit, c.coeffs, c.solver)));
  run.summary["P0"] = limit.P.front();
  run.summary["K0"] = limit.K.front();
  run.summary["phi0"] = limit.phi.front();
  const json sec = section(c.document, "riccati");
  if (sec.contains("Ns")) {
    for (auto n : populations(sec, "riccati.")) {
      const auto fin = solve_finite_n(c.coeffs, n, c.grid, c.solver);
      run.write(riccati_file(fin.regime), riccati_table(fin, gains(fin, c.coeffs, c.solver)));
    }
  }
}

void do_mean_field(Run& run) {
  const auto& c = run.cfg;
  validate(c.coeffs, c.grid);
  const auto limit = solve_limit(c.coeffs, c.grid, c.solver);
  const auto g = gains(limit, c.coeffs, c.solver);
  const auto mf = solve_mean_field(c.coeffs, g, c.initial.mean(), c.grid);
  run.write("mean_field.csv", mean_field_table(mf));
  run.write("law_decentralized.csv", law_table(make_law(LawKind::decentralized, g, mf)));
  run.summary["xbar0"] = mf.values.front();
  run.summary["xbarT"] = mf.values.back();
}

void do_simulate(Run& run, bool write_paths) {
  const auto& c = run.cfg;
  validate(c.coeffs, c.grid);
  const json sec = section(c.document, "simulation");
  const std::int64_t n = static_cast<std::int64_t>(count(require(sec, "N", "simulation."),
                                                         "simulation.N"));
  Regime::finite(n);
  const auto kind = parse_law_kind(
      sec.contains("law") ? sec.at("law").get<std::string>() : std::string("decentralized"));
  const double theta = sec.contains("theta") ? number(sec, "theta", "simulation.") : 1.0;

  StrategyLaw law;
  if (kind == LawKind::centralized) {
    const auto fin = solve_finite_n(c.coeffs, n, c.grid, c.solver);
    law = make_law(kind, gains(fin, c.coeffs, c.solver));
  } else {
    const auto limit = solve_limit(c.coeffs, c.grid, c.solver);
    const auto g = gains(limit, c.coeffs, c.solver);
    std::optional<MeanFieldPath> mf;
    if (kind == LawKind::decentralized || kind == LawKind::scaled) {
      mf = solve_mean_field(c.coeffs, g, c.initial.mean(), c.grid);
    }
    law = make_law(kind, g, mf, theta);
  }

  PopulationConfig pop;
  pop.agents = static_cast<std::size_t>(n);
  pop.replications = replications(sec, "simulation.");
  pop.master_seed = c.seed;
  pop.initial = c.initial;
  if (sec.contains("substeps")) {
    pop.noise_substeps = static_cast<std::size_t>(count(sec.at("substeps"), "simulation.substeps"));
    if (pop.noise_substeps < 1) throw ConfigurationError("config: simulation.substeps must be >= 1");
  }

  const auto result = population_costs(c.coeffs, law, pop, c.grid, write_paths, run.opts);
  run.write("law.csv", law_table(law));
  run.write("simulate_summary.csv", result.summary);
  for (const auto& paths : result.paths) {
    run.write("paths_rep" + std::to_string(paths.replication) + ".csv",
              paths_table(paths, c.grid));
  }
  run.summary["population_mean_cost"] = result.population_mean;
  run.summary["population_stderr"] = result.population_standard_error;
}

void do_epsilon_sweep(Run& run) {
  const auto& c = run.cfg;
  validate(c.coeffs, c.grid);
  const json sec = section(c.document, "sweep");
  const auto r = epsilon_sweep(c.coeffs, c.initial, populations(sec, "sweep."),
                               replications(sec, "sweep."), c.seed, c.grid, run.opts);
  run.write("epsilon_sweep.csv", r.table);
  run.summary["slope"] = r.slope.slope;
  run.summary["slope_stderr"] = r.slope.slope_standard_error;
}

void do_riccati_convergence(Run& run) {
  const auto& c = run.cfg;
  validate(c.coeffs, c.grid);
  const json sec = section(c.document, "convergence");
  const auto r = riccati_convergence(c.coeffs, populations(sec, "convergence."), c.grid, run.opts);
  run.write("riccati_convergence.csv", r.table);
  run.summary["slope_P"] = r.slope_P.slope;
  run.summary["slope_K"] = r.slope_K.slope;
  run.summary["slope_phi"] = r.slope_phi.slope;
}

void do_nash_gap(Run& run) {
  const auto& c = run.cfg;
  validate(c.coeffs, c.grid);
  const json sec = section(c.document, "nash_gap");
  const auto ns = populations(sec, "nash_gap.");
  const auto reps = replications(sec, "nash_gap.");
  if (ns.empty()) throw ConfigurationError("config: nash_gap.Ns is empty");
  ExperimentTable all;
  json per_n = json::array();
  for (auto n : ns) {
    const auto r = nash_gap(c.coeffs, c.initial, n, default_deviation_family(), reps, c.seed,
                            c.grid, run.opts);
    if (all.columns.empty()) {
      all.id = r.table.id;
      all.columns = r.table.columns;
    }
    for (const auto& row : r.table.rows) all.add_row(row);
    per_n.push_back({{"N", n},
                     {"max_gap", r.max_gap},
                     {"max_gap_stderr", r.max_gap_standard_error},
                     {"max_gap_deviation", r.max_gap_deviation},
                     {"calibration_gap", r.calibration_gap}});
  }
  run.write("nash_gap.csv", all);
  run.summary["per_N"] = per_n;
}

void do_figures(Run& run) {
  const auto& c = run.cfg;
  validate(c.coeffs, c.grid);
  const json sec = section(c.document, "sweep");
  const auto ns = sec.contains("Ns") ? populations(sec, "sweep.") : std::vector<std::int64_t>{};
  if (ns.empty()) {
    throw ConfigurationError(
        "figures: sweep.Ns is empty, so there is no epsilon(N) data for figure 2");
  }
  const auto limit = solve_limit(c.coeffs, c.grid, c.solver);
  const auto sweep = epsilon_sweep(c.coeffs, c.initial, ns, replications(sec, "sweep."), c.seed,
                                   c.grid, run.opts);
  for (const auto& p : figure_data(limit, sweep.table, run.out_dir)) {
    run.outputs.push_back(p.filename().string());
  }
  run.summary["slope"] = sweep.slope.slope;
}

json load_document(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigurationError("cannot read config file '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigurationError("config file '" + path + "' is not valid JSON: " + e.what());
  }
}

}  // namespace

LoadedConfig interpret_config(const json& document) {
  if (!document.is_object()) throw ConfigurationError("config: top level must be an object");
  LoadedConfig out;
  out.document = document;
  try {
    const json& grid = require(document, "grid", "");
    out.grid = TimeGrid(number(grid, "T", "grid."),
                        static_cast<std::size_t>(count(require(grid, "M", "grid."), "grid.M")));
    const json& model = require(document, "model", "");
    auto& c = out.coeffs;
    c.A = profile(model, "A");
    c.B = profile(model, "B");
    c.C = profile(model, "C");
    c.D = profile(model, "D");
    c.f = profile(model, "f");
    c.g = profile(model, "g");
    c.Q = profile(model, "Q");
    c.R = profile(model, "R");
    c.Gamma = profile(model, "Gamma");
    c.eta = profile(model, "eta");
    c.H = number(model, "H", "model.");
    c.Gamma0 = number(model, "Gamma0", "model.");
    c.eta0 = number(model, "eta0", "model.");
    out.initial = document.contains("initial") ? initial_law(document.at("initial"))
                                               : InitialLaw::point(0.0);
    if (document.contains("seed")) out.seed = count(document.at("seed"), "seed");
    const json solver = section(document, "solver");
    if (solver.contains("alpha_min")) out.solver.alpha_min = number(solver, "alpha_min", "solver.");
    if (solver.contains("blow_up_bound")) {
      out.solver.blow_up_bound = number(solver, "blow_up_bound", "solver.");
    }
  } catch (const json::exception& e) {
    throw ConfigurationError(std::string("config: ") + e.what());
  }
  return out;
}

std::string config_fingerprint(const json& document) { return fnv1a_hex(document.dump()); }

int run(int argc, char** argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run(args);
}

int run(const std::vector<std::string>& args) {
  CLI::App app{"Scalar indefinite LQ mean-field game solver and simulation harness", "lqmfg"};
  app.require_subcommand(1, 1);

  std::string config_path;
  std::string out_dir = "out";
  std::uint64_t seed = 0;
  std::size_t grid_steps = 0;
  std::size_t workers = 0;
  std::vector<std::int64_t> ns;
  std::size_t reps = 0;
  std::int64_t agents = 0;
  std::string law;
  double theta = 1.0;
  std::size_t substeps = 1;
  bool write_paths = false;

  struct Overrides {
    CLI::Option* seed = nullptr;
    CLI::Option* grid = nullptr;
    CLI::Option* ns = nullptr;
    CLI::Option* reps = nullptr;
    CLI::Option* agents = nullptr;
    CLI::Option* law = nullptr;
    CLI::Option* theta = nullptr;
    CLI::Option* substeps = nullptr;
  };
  std::map<std::string, Overrides> overrides;

  auto add = [&](const std::string& name, const std::string& help) {
    auto* sub = app.add_subcommand(name, help);
    auto& o = overrides[name];
    sub->add_option("--config", config_path, "JSON config file")->required();
    o.seed = sub->add_option("--seed", seed, "Master seed (overrides config)");
    o.grid = sub->add_option("--grid-steps", grid_steps, "Grid steps M (overrides config)")
                 ->check(CLI::PositiveNumber);
    sub->add_option("--out-dir", out_dir, "Output directory")->capture_default_str();
    sub->add_option("--workers", workers, "Worker threads (0 = all cores)");
    return sub;
  };

  add("validate", "Check model assumptions and print a report");
  auto* riccati = add("solve-riccati", "Solve the limit and finite-N Riccati systems");
  overrides["solve-riccati"].ns =
      riccati->add_option("--N", ns, "Finite populations to solve as well")->delimiter(',');
  add("mean-field", "Solve the mean-field ODE and write the decentralized law");
  auto* simulate = add("simulate", "Simulate a population and report costs");
  {
    auto& o = overrides["simulate"];
    o.agents = simulate->add_option("--N", agents, "Population size");
    o.reps = simulate->add_option("--reps", reps, "Replications");
    o.law = simulate->add_option("--law", law, "Strategy law")
                ->check(CLI::IsMember(
                    {"decentralized", "centralized", "zero", "scaled", "meanfield-informed"}));
    o.theta = simulate->add_option("--theta", theta, "Scale factor for the scaled law");
    o.substeps = simulate->add_option("--substeps", substeps, "Brownian substeps per step")
                     ->check(CLI::PositiveNumber);
    simulate->add_flag("--write-paths", write_paths, "Write one path CSV per replication");
  }
  for (const char* name : {"epsilon-sweep", "riccati-convergence", "nash-gap", "figures"}) {
    const std::string n = name;
    auto* sub = add(n, n == "epsilon-sweep"         ? "Mean-field estimate epsilon(N)"
                       : n == "riccati-convergence" ? "Finite-N Riccati errors against the limit"
                       : n == "nash-gap"            ? "Paired deviation gains per population"
                                                    : "Write figure data and gnuplot scripts");
    overrides[n].ns = sub->add_option("--Ns", ns, "Population sizes")->delimiter(',');
    if (n != "riccati-convergence") {
      overrides[n].reps = sub->add_option("--reps", reps, "Replications per size");
    }
  }

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n\n" << app.help();
    return kConfigError;
  }

  auto* chosen = app.get_subcommands().front();
  const std::string name = chosen->get_name();
  const auto& o = overrides[name];
  const auto started = std::chrono::steady_clock::now();

  Run run;
  run.out_dir = out_dir;
  run.opts.workers = workers;
  json manifest = {{"tool", "lqmfg"},
                   {"version", kToolVersion},
                   {"subcommand", name},
                   {"config_fingerprint", nullptr},
                   {"seed", nullptr},
                   {"grid", nullptr}};
  std::string error;
  int code = kOk;

  try {
    json doc = load_document(config_path);
    if (!doc.is_object()) throw ConfigurationError("config: top level must be an object");
    if (o.seed && o.seed->count()) doc["seed"] = seed;
    if (o.grid && o.grid->count()) doc["grid"]["M"] = grid_steps;
    const std::string sec = name == "solve-riccati"         ? "riccati"
                            : name == "riccati-convergence" ? "convergence"
                            : name == "nash-gap"            ? "nash_gap"
                            : name == "simulate"            ? "simulation"
                                                            : "sweep";
    if (o.ns && o.ns->count()) doc[sec]["Ns"] = ns;
    if (o.reps && o.reps->count()) doc[sec]["reps"] = reps;
    if (o.agents && o.agents->count()) doc[sec]["N"] = agents;
    if (o.law && o.law->count()) doc[sec]["law"] = law;
    if (o.theta && o.theta->count()) doc[sec]["theta"] = theta;
    if (o.substeps && o.substeps->count()) doc[sec]["substeps"] = substeps;

    run.cfg = interpret_config(doc);
    manifest["config_fingerprint"] = config_fingerprint(doc);
    manifest["seed"] = run.cfg.seed;
    manifest["grid"] = {{"T", run.cfg.grid.horizon()}, {"M", run.cfg.grid.steps()}};

    std::error_code ec;
    fs::create_directories(run.out_dir, ec);
    if (ec) throw IoError("cannot create '" + run.out_dir.string() + "': " + ec.message());

    if (name == "validate") do_validate(run);
    else if (name == "solve-riccati") do_solve_riccati(run);
    else if (name == "mean-field") do_mean_field(run);
    else if (name == "simulate") do_simulate(run, write_paths);
    else if (name == "epsilon-sweep") do_epsilon_sweep(run);
    else if (name == "riccati-convergence") do_riccati_convergence(run);
    else if (name == "nash-gap") do_nash_gap(run);
    else do_figures(run);
  } catch (const ConfigurationError& e) {
    code = kConfigError;
    error = e.what();
  } catch (const SolverError& e) {
    code = kSolverError;
    error = e.what();
  } catch (const SimulationDivergedError& e) {
    code = kDivergence;
    error = e.what();
  } catch (const IoError& e) {
    code = kIoError;
    error = e.what();
  } catch (const json::exception& e) {
    code = kConfigError;
    error = std::string("config: ") + e.what();
  } catch (const std::exception& e) {
    code = kInternalError;
    error = e.what();
  }

  const double elapsed =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  manifest["outputs"] = run.outputs;
  manifest["summary"] = run.summary;
  manifest["exit_code"] = code;
  manifest["error"] = error.empty() ? json(nullptr) : json(error);
  manifest["duration_seconds"] = elapsed;

  try {
    std::error_code ec;
    fs::create_directories(run.out_dir, ec);
    write_text(run.out_dir / (name + ".manifest.json"), manifest.dump(2) + "\n");
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    if (code == kOk) code = kIoError;
  }

  if (code != kOk) {
    std::cerr << "error: " << error << "\n";
  } else {
    for (const auto& f : run.outputs) std::cout << "wrote " << (run.out_dir / f).string() << "\n";
  }
  return code;
}

}  // namespace lqmfg::cli
