#include "lqmfg/riccati.hpp"

#include <array>
#include <cmath>
#include <sstream>

#include "lqmfg/error.hpp"

namespace lqmfg {

namespace {

using State = std::array<double, 3>;  // P, K, phi

[[noreturn]] void throw_singular(double alpha, double t, const SolverOptions& opts) {
  std::ostringstream os;
  os.precision(17);
  os << "singular gain: |alpha| = " << std::fabs(alpha) << " < alpha_min = " << opts.alpha_min
     << " at t = " << t;
  throw SingularGainError(os.str(), t);
}

void check_alpha(double alpha, double t, const SolverOptions& opts) {
  if (!(std::fabs(alpha) >= opts.alpha_min)) throw_singular(alpha, t, opts);
}

void check_bounded(const State& y, double t, const SolverOptions& opts) {
  static constexpr const char* kNames[] = {"P", "K", "phi"};
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (!std::isfinite(y[i]) || std::fabs(y[i]) > opts.blow_up_bound) {
      std::ostringstream os;
      os.precision(17);
      os << "Riccati system not solvable: |" << kNames[i] << "| exceeds " << opts.blow_up_bound
         << " (value " << y[i] << ") at t = " << t;
      throw NonSolvableError(os.str(), t);
    }
  }
}

State axpy(const State& y, double a, const State& x) {
  return {y[0] + a * x[0], y[1] + a * x[1], y[2] + a * x[2]};
}

/// Classical RK4 from t_M back to t_0. `rhs(c, y, t)` returns dy/dt.
template <class Rhs>
RiccatiSolution integrate_backward(const CoefficientSet& coeffs, const TimeGrid& grid,
                                   const Regime& regime, const SolverOptions& opts, Rhs rhs) {
  RiccatiSolution sol;
  sol.regime = regime;
  sol.grid = grid;
  sol.P.assign(grid.size(), 0.0);
  sol.K.assign(grid.size(), 0.0);
  sol.phi.assign(grid.size(), 0.0);

  const auto term = terminal_values(coeffs, regime);
  State y{term.P, term.K, term.phi};
  const std::size_t M = grid.steps();
  sol.P[M] = y[0];
  sol.K[M] = y[1];
  sol.phi[M] = y[2];
  check_bounded(y, grid.node(M), opts);

  const double h = grid.dt();
  for (std::size_t k = M; k-- > 0;) {
    const double t_hi = grid.node(k + 1);
    const double t_lo = grid.node(k);
    const double t_mid = 0.5 * (t_lo + t_hi);
    const auto c_hi = coeffs.at_node(grid, k + 1);
    const auto c_mid = coeffs.at_midpoint(grid, k);
    const auto c_lo = coeffs.at_node(grid, k);

    const State k1 = rhs(c_hi, y, t_hi);
    const State k2 = rhs(c_mid, axpy(y, -0.5 * h, k1), t_mid);
    const State k3 = rhs(c_mid, axpy(y, -0.5 * h, k2), t_mid);
    const State k4 = rhs(c_lo, axpy(y, -h, k3), t_lo);
    for (std::size_t i = 0; i < 3; ++i) {
      y[i] -= h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    check_bounded(y, t_lo, opts);
    sol.P[k] = y[0];
    sol.K[k] = y[1];
    sol.phi[k] = y[2];
  }
  return sol;
}

}  // namespace

Regime Regime::finite(std::int64_t population) {
  if (population < 1) {
    throw ConfigurationError("population size N must be >= 1, got " + std::to_string(population));
  }
  return Regime(population);
}

std::int64_t Regime::population() const {
  if (is_limit()) throw ConfigurationError("limit regime has no finite population size");
  return population_;
}

double Regime::inverse_population() const noexcept {
  return is_limit() ? 0.0 : 1.0 / static_cast<double>(population_);
}

std::string Regime::describe() const {
  return is_limit() ? std::string("limit") : "finite(N=" + std::to_string(population_) + ")";
}

TerminalValues terminal_values(const CoefficientSet& coeffs, const Regime& regime) noexcept {
  if (regime.is_limit()) {
    return {coeffs.H, -coeffs.H * coeffs.Gamma0, -coeffs.H * coeffs.eta0};
  }
  const double n = static_cast<double>(regime.population());
  const double scale = coeffs.H * (1.0 - coeffs.Gamma0 / n);
  return {scale, -scale * coeffs.Gamma0, -scale * coeffs.eta0};
}

GainValues gain_values(const CoefficientValues& c, double P, double K, double phi,
                       double inverse_population) noexcept {
  const double weight = P + inverse_population * K;
  return {c.R + weight * c.D * c.D, c.B * P + weight * c.C * c.D, c.B * K,
          c.B * phi + weight * c.g * c.D};
}

RiccatiSolution solve_limit(const CoefficientSet& coeffs, const TimeGrid& grid,
                            const SolverOptions& opts) {
  auto rhs = [&opts](const CoefficientValues& c, const State& y, double t) -> State {
    const double P = y[0], K = y[1], phi = y[2];
    const double alpha = c.R + c.D * c.D * P;
    check_alpha(alpha, t, opts);
    const double bcd = c.B + c.C * c.D;
    const double dP = -((2.0 * c.A + c.C * c.C) * P + c.Q - bcd * bcd * P * P / alpha);

    const double beta = c.B * P + P * c.C * c.D;
    const double a = -c.Q * c.Gamma;
    const double b = 2.0 * (c.A - c.B * beta / alpha);
    const double cq = -c.B * c.B / alpha;
    const double dK = -(a + b * K + cq * K * K);

    const double delta = c.B * phi + P * c.g * c.D;
    const double dphi = -(c.f * P + c.f * K + c.A * phi + c.C * P * c.g - K * c.B * delta / alpha -
                          beta * delta / alpha - c.Q * c.eta);
    return {dP, dK, dphi};
  };
  return integrate_backward(coeffs, grid, Regime::limit(), opts, rhs);
}

RiccatiSolution solve_finite_n(const CoefficientSet& coeffs, std::int64_t population,
                               const TimeGrid& grid, const SolverOptions& opts) {
  const Regime regime = Regime::finite(population);
  const double inv_n = regime.inverse_population();
  auto rhs = [&opts, inv_n](const CoefficientValues& c, const State& y, double t) -> State {
    const double P = y[0], K = y[1], phi = y[2];
    const double weight = P + inv_n * K;
    const double alpha = c.R + weight * c.D * c.D;
    check_alpha(alpha, t, opts);
    const double beta = c.B * P + weight * c.C * c.D;
    const double gamma = c.B * K;
    const double delta = c.B * phi + weight * c.g * c.D;
    const double q_scale = (1.0 - c.Gamma * inv_n) * c.Q;

    const double dP = -(2.0 * c.A * P - P * c.B * beta / alpha +
                        c.C * weight * (c.C - c.D * beta / alpha) + q_scale);
    const double dK = -(2.0 * c.A * K - P * c.B * gamma / alpha -
                        K * c.B * (beta + gamma) / alpha - c.C * c.D * weight * gamma / alpha -
                        q_scale * c.Gamma);
    const double dphi = -(c.f * P + c.f * K + c.A * phi - P * c.B * delta / alpha -
                          K * c.B * delta / alpha + c.C * weight * (c.g - c.D * delta / alpha) -
                          q_scale * c.eta);
    return {dP, dK, dphi};
  };
  return integrate_backward(coeffs, grid, regime, opts, rhs);
}

GainSchedule gains(const RiccatiSolution& sol, const CoefficientSet& coeffs,
                   const SolverOptions& opts) {
  const auto& grid = sol.grid;
  if (sol.P.size() != grid.size() || sol.K.size() != grid.size() ||
      sol.phi.size() != grid.size()) {
    throw ConfigurationError("Riccati solution is not sampled on its grid");
  }
  GainSchedule out;
  out.regime = sol.regime;
  out.grid = grid;
  out.alpha.resize(grid.size());
  out.beta.resize(grid.size());
  out.gamma.resize(grid.size());
  out.delta.resize(grid.size());
  const double inv_n = sol.regime.inverse_population();
  for (std::size_t k = 0; k < grid.size(); ++k) {
    if (!std::isfinite(sol.P[k]) || !std::isfinite(sol.K[k]) || !std::isfinite(sol.phi[k])) {
      throw NonSolvableError("Riccati solution is not finite at t = " +
                                 std::to_string(grid.node(k)),
                             grid.node(k));
    }
    const auto g = gain_values(coeffs.at_node(grid, k), sol.P[k], sol.K[k], sol.phi[k], inv_n);
    check_alpha(g.alpha, grid.node(k), opts);
    out.alpha[k] = g.alpha;
    out.beta[k] = g.beta;
    out.gamma[k] = g.gamma;
    out.delta[k] = g.delta;
  }
  return out;
}

}  // namespace lqmfg
