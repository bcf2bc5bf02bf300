#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "lqmfg/model.hpp"

namespace lqmfg {

/// Which Riccati system a solution or gain schedule belongs to: the
/// N -> infinity limit or the finite population of size N.
class Regime {
 public:
  static Regime limit() { return Regime(0); }
  static Regime finite(std::int64_t population);

  bool is_limit() const noexcept { return population_ == 0; }
  /// Population size; throws for the limit regime.
  std::int64_t population() const;
  /// 1/N, or 0 in the limit.
  double inverse_population() const noexcept;
  std::string describe() const;

  bool operator==(const Regime&) const = default;

 private:
  explicit Regime(std::int64_t population) : population_(population) {}
  std::int64_t population_;
};

struct SolverOptions {
  /// Smallest admissible |alpha|; below it the feedback gain is singular.
  double alpha_min = 1e-10;
  /// Any |P|, |K| or |phi| beyond this is treated as finite-time blow-up.
  double blow_up_bound = 1e8;
};

/// P, K, phi (or P_N, K_N, phi_N) sampled on the grid nodes.
struct RiccatiSolution {
  Regime regime = Regime::limit();
  TimeGrid grid{1.0, 2};
  std::vector<double> P;
  std::vector<double> K;
  std::vector<double> phi;
};

/// Feedback gains alpha, beta, gamma, delta on the grid nodes. The control
/// law is u = -(beta x + gamma m + delta) / alpha.
struct GainSchedule {
  Regime regime = Regime::limit();
  TimeGrid grid{1.0, 2};
  std::vector<double> alpha;
  std::vector<double> beta;
  std::vector<double> gamma;
  std::vector<double> delta;
};

/// Gains at one instant for the given regime; `weight` = P + K/N (P in the limit).
struct GainValues {
  double alpha, beta, gamma, delta;
};
GainValues gain_values(const CoefficientValues& c, double P, double K, double phi,
                       double inverse_population) noexcept;

/// Backward RK4 for the limiting system. P is autonomous; K and phi are
/// driven by the stage values of P (and K), so the sweep is triangular.
RiccatiSolution solve_limit(const CoefficientSet& coeffs, const TimeGrid& grid,
                            const SolverOptions& opts = {});

/// Backward RK4 for the coupled finite-population system (P_N, K_N, phi_N).
RiccatiSolution solve_finite_n(const CoefficientSet& coeffs, std::int64_t population,
                               const TimeGrid& grid, const SolverOptions& opts = {});

GainSchedule gains(const RiccatiSolution& sol, const CoefficientSet& coeffs,
                   const SolverOptions& opts = {});

/// Terminal values (P(T), K(T), phi(T)) for a regime.
struct TerminalValues {
  double P, K, phi;
};
TerminalValues terminal_values(const CoefficientSet& coeffs, const Regime& regime) noexcept;

}  // namespace lqmfg
