#pragma once

#include <cstddef>
#include <string>
#include <variant>
#include <vector>

namespace lqmfg {

/// Uniform grid t_k = k * T / M on [0, T].
class TimeGrid {
 public:
  TimeGrid(double horizon, std::size_t steps);

  double t0() const noexcept { return 0.0; }
  double horizon() const noexcept { return horizon_; }
  std::size_t steps() const noexcept { return steps_; }
  std::size_t size() const noexcept { return steps_ + 1; }
  double dt() const noexcept { return dt_; }

  /// Node time; the last node is exactly the horizon.
  double node(std::size_t k) const;

  std::vector<double> nodes() const;

  bool operator==(const TimeGrid& other) const noexcept {
    return horizon_ == other.horizon_ && steps_ == other.steps_;
  }

 private:
  double horizon_;
  std::size_t steps_;
  double dt_;
};

/// A deterministic scalar coefficient: either a constant or samples on the
/// grid nodes with piecewise-linear evaluation in between.
class TimeProfile {
 public:
  TimeProfile() : TimeProfile(0.0) {}
  TimeProfile(double value) : data_(value) {}  // NOLINT(google-explicit-constructor)

  static TimeProfile constant(double value) { return TimeProfile(value); }
  static TimeProfile sampled(std::vector<double> values);

  bool is_constant() const noexcept { return std::holds_alternative<double>(data_); }
  const std::vector<double>& samples() const;
  double constant_value() const;

  /// Value at grid node k; `grid` fixes the alignment of sampled profiles.
  double at_node(const TimeGrid& grid, std::size_t k) const;
  /// Linear interpolant at the midpoint of cell [t_k, t_{k+1}].
  double at_midpoint(const TimeGrid& grid, std::size_t k) const;
  /// Piecewise-linear evaluation at time t in [0, T]; exact at nodes.
  double eval(const TimeGrid& grid, double t) const;

  bool all_finite() const noexcept;
  bool aligned_with(const TimeGrid& grid) const noexcept;

 private:
  std::variant<double, std::vector<double>> data_;
};

/// Snapshot of every time-dependent coefficient at one instant.
struct CoefficientValues {
  double A, B, C, D, f, g, Q, R, Gamma, eta;
};

/// Coefficients of the state equation and cost functional. Gamma and eta
/// are time profiles; H, Gamma0, eta0 are terminal-cost scalars.
struct CoefficientSet {
  TimeProfile A, B, C, D, f, g;
  TimeProfile Q, R, Gamma, eta;
  double H = 0.0;
  double Gamma0 = 0.0;
  double eta0 = 0.0;

  /// Every coefficient (profiles and terminal scalars) set to `value`.
  static CoefficientSet uniform(double value);

  CoefficientValues at_node(const TimeGrid& grid, std::size_t k) const;
  CoefficientValues at_midpoint(const TimeGrid& grid, std::size_t k) const;
  CoefficientValues eval(const TimeGrid& grid, double t) const;
};

struct UniformLaw {
  double lower;
  double upper;
};

struct GaussianLaw {
  double mean;
  double variance;
};

struct PointLaw {
  double value;
};

/// Law of the i.i.d. initial states.
class InitialLaw {
 public:
  using Spec = std::variant<UniformLaw, GaussianLaw, PointLaw>;

  InitialLaw(Spec spec);  // NOLINT(google-explicit-constructor)
  static InitialLaw uniform(double lower, double upper) { return {UniformLaw{lower, upper}}; }
  static InitialLaw gaussian(double mean, double variance) { return {GaussianLaw{mean, variance}}; }
  static InitialLaw point(double value) { return {PointLaw{value}}; }

  const Spec& spec() const noexcept { return spec_; }
  double mean() const;
  double second_moment() const;

  /// Maps a uniform draw in (0,1) and a standard normal draw to a sample.
  double sample(double uniform01, double standard_normal) const;

  std::string describe() const;

 private:
  Spec spec_;
};

struct ValidationReport {
  bool q_nonnegative = true;
  bool h_nonnegative = true;
  /// R(t_k) < 0 somewhere; permitted, exercised later by the convexity probe.
  bool indefinite_control_weight = false;
  double min_Q = 0.0;
  double min_R = 0.0;
  std::vector<std::string> notes;

  bool a3_holds() const noexcept { return q_nonnegative && h_nonnegative; }
  std::string to_string() const;

  bool operator==(const ValidationReport&) const = default;
};

/// Checks finiteness, grid alignment, Q >= 0 and H >= 0, and flags
/// negative control weights. Throws MalformedModelError on bad data.
ValidationReport validate(const CoefficientSet& coeffs, const TimeGrid& grid);

}  // namespace lqmfg
