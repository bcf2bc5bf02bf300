#pragma once

#include <optional>
#include <string>
#include <vector>

#include "lqmfg/model.hpp"
#include "lqmfg/riccati.hpp"

namespace lqmfg {

/// Deterministic mean-field trajectory x̄ on the grid.
struct MeanFieldPath {
  TimeGrid grid{1.0, 2};
  double initial = 0.0;
  std::vector<double> values;
};

/// Forward RK4 for dx̄ = [(A - B(beta+gamma)/alpha) x̄ - B delta/alpha + f] dt
/// from x̄(0) = initial. `limit_gains` must come from the limit regime.
MeanFieldPath solve_mean_field(const CoefficientSet& coeffs, const GainSchedule& limit_gains,
                               double initial, const TimeGrid& grid);

enum class LawKind { decentralized, centralized, zero, scaled, meanfield_informed };

/// Where the mean term m in u = k_self x + k_mean m + k_const comes from.
enum class MeanSource { precomputed, realized };

std::string to_string(LawKind kind);
std::string to_string(MeanSource source);
LawKind parse_law_kind(const std::string& name);

/// A sampled affine feedback law u_i(t_k) = k_self[k] x_i + k_mean[k] m[k] + k_const[k].
struct StrategyLaw {
  LawKind kind = LawKind::zero;
  double theta = 1.0;  // scaling factor, meaningful for LawKind::scaled
  MeanSource mean_source = MeanSource::precomputed;
  TimeGrid grid{1.0, 2};
  std::vector<double> k_self;
  std::vector<double> k_mean;
  std::vector<double> k_const;
  /// x̄ samples when mean_source is precomputed; empty otherwise.
  std::vector<double> mean_path;

  /// Control value at node k for own state x and realized average m_realized.
  double control(std::size_t k, double x, double m_realized) const noexcept {
    const double m = mean_source == MeanSource::precomputed ? mean_path[k] : m_realized;
    return k_self[k] * x + k_mean[k] * m + k_const[k];
  }

  bool operator==(const StrategyLaw&) const = default;
};

/// Builds a feedback law from a gain schedule.
///   decentralized / scaled(theta): limit gains, mean from `mean_field`;
///   meanfield_informed: limit gains, mean from the realized average;
///   centralized: finite-N gains, mean from the realized average;
///   zero: all gains vanish.
/// Throws ConfigurationError on a kind/regime mismatch.
StrategyLaw make_law(LawKind kind, const GainSchedule& gains,
                     const std::optional<MeanFieldPath>& mean_field = std::nullopt,
                     double theta = 1.0);

}  // namespace lqmfg
