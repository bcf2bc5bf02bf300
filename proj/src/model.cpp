#include "lqmfg/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "lqmfg/error.hpp"

namespace lqmfg {

TimeGrid::TimeGrid(double horizon, std::size_t steps) : horizon_(horizon), steps_(steps) {
  if (!(std::isfinite(horizon) && horizon > 0.0)) {
    throw ConfigurationError("time grid: horizon T must be finite and positive");
  }
  if (steps < 2) {
    throw ConfigurationError("time grid: step count M must be at least 2");
  }
  dt_ = horizon_ / static_cast<double>(steps_);
}

double TimeGrid::node(std::size_t k) const {
  if (k > steps_) {
    throw OutOfRangeError("time grid: node index " + std::to_string(k) + " exceeds M=" +
                          std::to_string(steps_));
  }
  return k == steps_ ? horizon_ : static_cast<double>(k) * dt_;
}

std::vector<double> TimeGrid::nodes() const {
  std::vector<double> out(size());
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = node(k);
  return out;
}

TimeProfile TimeProfile::sampled(std::vector<double> values) {
  if (values.size() < 3) {
    throw MalformedModelError("sampled profile needs at least 3 samples (M >= 2)");
  }
  TimeProfile p;
  p.data_ = std::move(values);
  return p;
}

const std::vector<double>& TimeProfile::samples() const {
  if (is_constant()) throw ConfigurationError("profile is constant, not sampled");
  return std::get<std::vector<double>>(data_);
}

double TimeProfile::constant_value() const {
  if (!is_constant()) throw ConfigurationError("profile is sampled, not constant");
  return std::get<double>(data_);
}

double TimeProfile::at_node(const TimeGrid& grid, std::size_t k) const {
  if (is_constant()) return std::get<double>(data_);
  const auto& v = std::get<std::vector<double>>(data_);
  if (v.size() != grid.size()) {
    throw MalformedModelError("sampled profile has " + std::to_string(v.size()) +
                              " samples, grid needs " + std::to_string(grid.size()));
  }
  return v.at(k);
}

double TimeProfile::at_midpoint(const TimeGrid& grid, std::size_t k) const {
  if (is_constant()) return std::get<double>(data_);
  return 0.5 * (at_node(grid, k) + at_node(grid, k + 1));
}

double TimeProfile::eval(const TimeGrid& grid, double t) const {
  if (!(t >= grid.t0() && t <= grid.horizon())) {
    std::ostringstream os;
    os << "profile evaluated at t=" << t << " outside [0, " << grid.horizon() << "]";
    throw OutOfRangeError(os.str());
  }
  if (is_constant()) return std::get<double>(data_);

  const double pos = t / grid.dt();
  const auto nearest = static_cast<std::size_t>(std::llround(pos));
  if (nearest <= grid.steps() && grid.node(nearest) == t) return at_node(grid, nearest);

  auto k = static_cast<std::size_t>(std::floor(pos));
  k = std::min(k, grid.steps() - 1);
  const double w = (t - grid.node(k)) / grid.dt();
  const double lo = at_node(grid, k);
  const double hi = at_node(grid, k + 1);
  return lo + w * (hi - lo);
}

bool TimeProfile::all_finite() const noexcept {
  if (is_constant()) return std::isfinite(std::get<double>(data_));
  const auto& v = std::get<std::vector<double>>(data_);
  return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

bool TimeProfile::aligned_with(const TimeGrid& grid) const noexcept {
  return is_constant() || std::get<std::vector<double>>(data_).size() == grid.size();
}

CoefficientSet CoefficientSet::uniform(double value) {
  CoefficientSet c;
  c.A = c.B = c.C = c.D = c.f = c.g = value;
  c.Q = c.R = c.Gamma = c.eta = value;
  c.H = c.Gamma0 = c.eta0 = value;
  return c;
}

CoefficientValues CoefficientSet::at_node(const TimeGrid& grid, std::size_t k) const {
  return {A.at_node(grid, k), B.at_node(grid, k), C.at_node(grid, k),     D.at_node(grid, k),
          f.at_node(grid, k), g.at_node(grid, k), Q.at_node(grid, k),     R.at_node(grid, k),
          Gamma.at_node(grid, k), eta.at_node(grid, k)};
}

CoefficientValues CoefficientSet::at_midpoint(const TimeGrid& grid, std::size_t k) const {
  return {A.at_midpoint(grid, k),     B.at_midpoint(grid, k),  C.at_midpoint(grid, k),
          D.at_midpoint(grid, k),     f.at_midpoint(grid, k),  g.at_midpoint(grid, k),
          Q.at_midpoint(grid, k),     R.at_midpoint(grid, k),  Gamma.at_midpoint(grid, k),
          eta.at_midpoint(grid, k)};
}

CoefficientValues CoefficientSet::eval(const TimeGrid& grid, double t) const {
  return {A.eval(grid, t), B.eval(grid, t), C.eval(grid, t),     D.eval(grid, t),
          f.eval(grid, t), g.eval(grid, t), Q.eval(grid, t),     R.eval(grid, t),
          Gamma.eval(grid, t), eta.eval(grid, t)};
}

InitialLaw::InitialLaw(Spec spec) : spec_(spec) {
  if (const auto* u = std::get_if<UniformLaw>(&spec_)) {
    if (!(std::isfinite(u->lower) && std::isfinite(u->upper) && u->lower <= u->upper)) {
      throw ConfigurationError("uniform initial law needs finite a <= b");
    }
  } else if (const auto* g = std::get_if<GaussianLaw>(&spec_)) {
    if (!(std::isfinite(g->mean) && std::isfinite(g->variance) && g->variance >= 0.0)) {
      throw ConfigurationError("gaussian initial law needs finite mean and variance >= 0");
    }
  } else if (!std::isfinite(std::get<PointLaw>(spec_).value)) {
    throw ConfigurationError("point initial law needs a finite value");
  }
}

double InitialLaw::mean() const {
  struct {
    double operator()(const UniformLaw& u) const { return 0.5 * (u.lower + u.upper); }
    double operator()(const GaussianLaw& g) const { return g.mean; }
    double operator()(const PointLaw& p) const { return p.value; }
  } visitor;
  return std::visit(visitor, spec_);
}

double InitialLaw::second_moment() const {
  struct {
    double operator()(const UniformLaw& u) const {
      return (u.lower * u.lower + u.lower * u.upper + u.upper * u.upper) / 3.0;
    }
    double operator()(const GaussianLaw& g) const { return g.variance + g.mean * g.mean; }
    double operator()(const PointLaw& p) const { return p.value * p.value; }
  } visitor;
  return std::visit(visitor, spec_);
}

double InitialLaw::sample(double uniform01, double standard_normal) const {
  if (const auto* u = std::get_if<UniformLaw>(&spec_)) {
    return u->lower + (u->upper - u->lower) * uniform01;
  }
  if (const auto* g = std::get_if<GaussianLaw>(&spec_)) {
    return g->mean + std::sqrt(g->variance) * standard_normal;
  }
  return std::get<PointLaw>(spec_).value;
}

std::string InitialLaw::describe() const {
  std::ostringstream os;
  os.precision(17);
  if (const auto* u = std::get_if<UniformLaw>(&spec_)) {
    os << "uniform(" << u->lower << ", " << u->upper << ")";
  } else if (const auto* g = std::get_if<GaussianLaw>(&spec_)) {
    os << "gaussian(" << g->mean << ", " << g->variance << ")";
  } else {
    os << "point(" << std::get<PointLaw>(spec_).value << ")";
  }
  return os.str();
}

std::string ValidationReport::to_string() const {
  std::ostringstream os;
  os << "A3 (Q >= 0, H >= 0): " << (a3_holds() ? "holds" : "VIOLATED") << "\n";
  os << "  min Q(t_k) = " << min_Q << (q_nonnegative ? "" : "  (negative)") << "\n";
  os << "  H >= 0: " << (h_nonnegative ? "yes" : "no") << "\n";
  os << "control weight R: " << (indefinite_control_weight ? "indefinite" : "nonnegative")
     << " (min R(t_k) = " << min_R << ")\n";
  for (const auto& n : notes) os << "note: " << n << "\n";
  return os.str();
}

ValidationReport validate(const CoefficientSet& coeffs, const TimeGrid& grid) {
  const std::pair<const char*, const TimeProfile*> profiles[] = {
      {"A", &coeffs.A}, {"B", &coeffs.B}, {"C", &coeffs.C}, {"D", &coeffs.D},
      {"f", &coeffs.f}, {"g", &coeffs.g}, {"Q", &coeffs.Q}, {"R", &coeffs.R},
      {"Gamma", &coeffs.Gamma}, {"eta", &coeffs.eta}};
  for (const auto& [name, profile] : profiles) {
    if (!profile->all_finite()) {
      throw MalformedModelError(std::string("coefficient ") + name + " has a non-finite value");
    }
    if (!profile->aligned_with(grid)) {
      throw MalformedModelError(std::string("coefficient ") + name +
                                " is not sampled on the grid (expected " +
                                std::to_string(grid.size()) + " values)");
    }
  }
  const std::pair<const char*, double> scalars[] = {
      {"H", coeffs.H}, {"Gamma0", coeffs.Gamma0}, {"eta0", coeffs.eta0}};
  for (const auto& [name, value] : scalars) {
    if (!std::isfinite(value)) {
      throw MalformedModelError(std::string("terminal coefficient ") + name + " is not finite");
    }
  }

  ValidationReport report;
  report.min_Q = std::numeric_limits<double>::infinity();
  report.min_R = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < grid.size(); ++k) {
    report.min_Q = std::min(report.min_Q, coeffs.Q.at_node(grid, k));
    report.min_R = std::min(report.min_R, coeffs.R.at_node(grid, k));
  }
  report.q_nonnegative = report.min_Q >= 0.0;
  report.h_nonnegative = coeffs.H >= 0.0;
  report.indefinite_control_weight = report.min_R < 0.0;
  if (report.indefinite_control_weight) {
    report.notes.emplace_back(
        "indefinite control weight: well-posedness relies on alpha = R + P D^2 staying away "
        "from zero and on the convexity condition");
  }
  return report;
}

}  // namespace lqmfg
