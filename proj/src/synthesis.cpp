#include "lqmfg/synthesis.hpp"

#include <cmath>
#include <sstream>

#include "lqmfg/error.hpp"

namespace lqmfg {

namespace {

// Midpoint value of a smooth node-sampled schedule on cell [t_k, t_{k+1}],
// fourth-order accurate (cubic through four neighbouring nodes).
double cubic_midpoint(const std::vector<double>& v, std::size_t k) {
  const std::size_t m = v.size() - 1;
  if (m < 3) return 0.5 * (v[k] + v[k + 1]);
  if (k == 0) return (5.0 * v[0] + 15.0 * v[1] - 5.0 * v[2] + v[3]) / 16.0;
  if (k + 1 == m) return (v[m - 3] - 5.0 * v[m - 2] + 15.0 * v[m - 1] + 5.0 * v[m]) / 16.0;
  return (-v[k - 1] + 9.0 * v[k] + 9.0 * v[k + 1] - v[k + 2]) / 16.0;
}

struct Drift {
  double slope;
  double offset;
  double operator()(double x) const noexcept { return slope * x + offset; }
};

Drift mean_field_drift(const CoefficientValues& c, double alpha, double beta, double gamma,
                       double delta) {
  return {c.A - c.B * (beta + gamma) / alpha, -c.B * delta / alpha + c.f};
}

void require_same_grid(const TimeGrid& a, const TimeGrid& b, const char* what) {
  if (!(a == b)) throw ConfigurationError(std::string(what) + " is sampled on a different grid");
}

}  // namespace

MeanFieldPath solve_mean_field(const CoefficientSet& coeffs, const GainSchedule& limit_gains,
                               double initial, const TimeGrid& grid) {
  if (!limit_gains.regime.is_limit()) {
    throw ConfigurationError("mean-field path needs limit-regime gains, got " +
                             limit_gains.regime.describe());
  }
  require_same_grid(limit_gains.grid, grid, "gain schedule");
  if (!std::isfinite(initial)) throw ConfigurationError("mean-field initial value is not finite");

  const auto& al = limit_gains.alpha;
  const auto& be = limit_gains.beta;
  const auto& ga = limit_gains.gamma;
  const auto& de = limit_gains.delta;

  MeanFieldPath out;
  out.grid = grid;
  out.initial = initial;
  out.values.resize(grid.size());
  out.values[0] = initial;

  const double h = grid.dt();
  double x = initial;
  for (std::size_t k = 0; k < grid.steps(); ++k) {
    const Drift lo = mean_field_drift(coeffs.at_node(grid, k), al[k], be[k], ga[k], de[k]);
    const Drift mid =
        mean_field_drift(coeffs.at_midpoint(grid, k), cubic_midpoint(al, k), cubic_midpoint(be, k),
                         cubic_midpoint(ga, k), cubic_midpoint(de, k));
    const Drift hi =
        mean_field_drift(coeffs.at_node(grid, k + 1), al[k + 1], be[k + 1], ga[k + 1], de[k + 1]);
    const double k1 = lo(x);
    const double k2 = mid(x + 0.5 * h * k1);
    const double k3 = mid(x + 0.5 * h * k2);
    const double k4 = hi(x + h * k3);
    if (!std::isfinite(k1 + k2 + k3 + k4)) {
      std::ostringstream os;
      os << "mean-field drift is not finite at t = " << grid.node(k);
      throw NonSolvableError(os.str(), grid.node(k));
    }
    x += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    out.values[k + 1] = x;
  }
  return out;
}

std::string to_string(LawKind kind) {
  switch (kind) {
    case LawKind::decentralized: return "decentralized";
    case LawKind::centralized: return "centralized";
    case LawKind::zero: return "zero";
    case LawKind::scaled: return "scaled";
    case LawKind::meanfield_informed: return "meanfield-informed";
  }
  return "unknown";
}

std::string to_string(MeanSource source) {
  return source == MeanSource::precomputed ? "precomputed" : "realized";
}

LawKind parse_law_kind(const std::string& name) {
  for (auto kind : {LawKind::decentralized, LawKind::centralized, LawKind::zero, LawKind::scaled,
                    LawKind::meanfield_informed}) {
    if (to_string(kind) == name) return kind;
  }
  throw ConfigurationError("unknown law kind '" + name +
                           "' (expected decentralized, centralized, zero, scaled, "
                           "meanfield-informed)");
}

StrategyLaw make_law(LawKind kind, const GainSchedule& gains,
                     const std::optional<MeanFieldPath>& mean_field, double theta) {
  const std::size_t n = gains.grid.size();
  if (gains.alpha.size() != n || gains.beta.size() != n || gains.gamma.size() != n ||
      gains.delta.size() != n) {
    throw ConfigurationError("gain schedule is not sampled on its grid");
  }
  if (!std::isfinite(theta)) throw ConfigurationError("law scaling theta must be finite");

  StrategyLaw law;
  law.kind = kind;
  law.theta = kind == LawKind::scaled ? theta : 1.0;
  law.grid = gains.grid;
  law.k_self.assign(n, 0.0);
  law.k_mean.assign(n, 0.0);
  law.k_const.assign(n, 0.0);

  if (kind == LawKind::zero) {
    law.mean_source = MeanSource::precomputed;
    law.mean_path.assign(n, 0.0);
    return law;
  }

  const bool wants_finite = kind == LawKind::centralized;
  if (wants_finite == gains.regime.is_limit()) {
    throw ConfigurationError(to_string(kind) + " law cannot be built from " +
                             gains.regime.describe() + " gains");
  }

  law.mean_source = (kind == LawKind::centralized || kind == LawKind::meanfield_informed)
                        ? MeanSource::realized
                        : MeanSource::precomputed;
  if (law.mean_source == MeanSource::precomputed) {
    if (!mean_field) {
      throw ConfigurationError(to_string(kind) + " law needs a precomputed mean-field path");
    }
    require_same_grid(mean_field->grid, gains.grid, "mean-field path");
    law.mean_path = mean_field->values;
  }

  // + 0.0 turns theta = 0 products of negative gains into +0.0.
  const double scale = law.theta;
  for (std::size_t k = 0; k < n; ++k) {
    const double inv_alpha = 1.0 / gains.alpha[k];
    law.k_self[k] = scale * (-gains.beta[k] * inv_alpha) + 0.0;
    law.k_mean[k] = scale * (-gains.gamma[k] * inv_alpha) + 0.0;
    law.k_const[k] = scale * (-gains.delta[k] * inv_alpha) + 0.0;
  }
  return law;
}

}  // namespace lqmfg
