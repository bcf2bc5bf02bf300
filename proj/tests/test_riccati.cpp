#include <gtest/gtest.h>

#include <array>
#include <cmath>

#include "fixtures.hpp"
#include "lqmfg/error.hpp"
#include "lqmfg/riccati.hpp"

using namespace lqmfg;
using lqmfg::fixtures::sup_diff;

TEST(Regime, Basics) {
  EXPECT_TRUE(Regime::limit().is_limit());
  EXPECT_EQ(Regime::limit().inverse_population(), 0.0);
  EXPECT_EQ(Regime::finite(4).inverse_population(), 0.25);
  EXPECT_THROW(Regime::finite(0), ConfigurationError);
  EXPECT_THROW(Regime::limit().population(), ConfigurationError);
}

TEST(Riccati, TanhClosedForm) {
  const TimeGrid g(1.0, 1000);
  const auto sol = solve_limit(fixtures::tanh_model(), g);
  double err = 0.0;
  for (std::size_t k = 0; k < g.size(); ++k) {
    err = std::max(err, std::fabs(sol.P[k] - std::tanh(1.0 - g.node(k))));
  }
  EXPECT_LE(err, 1e-8);
}

// B = C = D = 0 makes every equation linear: P = H + Q (T - t),
// K = -Gamma0 H - Q Gamma (T - t), phi = -H eta0 - Q eta (T - t) when f = A = 0.
TEST(Riccati, LinearCaseWithoutControlChannel) {
  CoefficientSet c = CoefficientSet::uniform(0.0);
  c.Q = 2.0;
  c.R = 1.0;
  c.Gamma = 0.5;
  c.eta = 0.25;
  c.H = 3.0;
  c.Gamma0 = 0.2;
  c.eta0 = 0.4;
  const TimeGrid g(2.0, 50);
  const auto sol = solve_limit(c, g);
  for (std::size_t k = 0; k < g.size(); ++k) {
    const double s = 2.0 - g.node(k);
    EXPECT_NEAR(sol.P[k], 3.0 + 2.0 * s, 1e-12);
    EXPECT_NEAR(sol.K[k], -0.6 - 1.0 * s, 1e-12);
    EXPECT_NEAR(sol.phi[k], -1.2 - 0.5 * s, 1e-12);
  }
}

TEST(Riccati, FourthOrderRefinement) {
  const auto c = fixtures::all_ones();
  const auto ref = solve_limit(c, TimeGrid(10.0, 1000000));
  auto error_at = [&](std::size_t m) {
    const auto sol = solve_limit(c, TimeGrid(10.0, m));
    const std::size_t stride = 1000000 / m;
    double e = 0.0;
    for (std::size_t k = 0; k <= m; ++k) e = std::max(e, std::fabs(sol.P[k] - ref.P[k * stride]));
    return e;
  };
  const double ratio = error_at(100) / error_at(200);
  EXPECT_GE(ratio, 8.0);
  EXPECT_LE(ratio, 32.0);
}

TEST(Riccati, ReferenceSteadyStateAndTerminalRows) {
  const TimeGrid g(10.0, 1000);
  const auto sol = solve_limit(fixtures::all_ones(), g);
  // Stationary root of 3P + 1 - 4P^2/(1+P) = 0.
  EXPECT_LE(std::fabs(sol.P.front() - (2.0 + std::sqrt(5.0))), 1e-3);
  EXPECT_EQ(sol.P.back(), 1.0);
  EXPECT_EQ(sol.K.back(), -1.0);
  EXPECT_EQ(sol.phi.back(), -1.0);
}

TEST(Riccati, FiniteNReducesToLimitWithoutCoupling) {
  const TimeGrid g(10.0, 1000);
  const auto c = fixtures::no_coupling();
  const auto limit = solve_limit(c, g);
  for (std::int64_t n : {1, 10, 1000}) {
    const auto fin = solve_finite_n(c, n, g);
    EXPECT_LE(sup_diff(fin.P, limit.P), 1e-9) << n;
    EXPECT_LE(sup_diff(fin.K, limit.K), 1e-9) << n;
    EXPECT_LE(sup_diff(fin.phi, limit.phi), 1e-9) << n;
  }
}

TEST(Riccati, FiniteNErrorsHalveWithN) {
  const TimeGrid g(10.0, 1000);
  const auto c = fixtures::all_ones();
  const auto limit = solve_limit(c, g);
  std::vector<std::array<double, 3>> errs;
  for (std::int64_t n : {10, 20, 40, 80}) {
    const auto fin = solve_finite_n(c, n, g);
    errs.push_back(std::array<double, 3>{sup_diff(fin.P, limit.P), sup_diff(fin.K, limit.K),
                    sup_diff(fin.phi, limit.phi)});
  }
  for (std::size_t i = 1; i < errs.size(); ++i) {
    for (std::size_t j = 0; j < 3; ++j) {
      const double ratio = errs[i][j] / errs[i - 1][j];
      EXPECT_GE(ratio, 0.3);
      EXPECT_LE(ratio, 0.7);
    }
  }
}

TEST(Riccati, FiniteTerminalValues) {
  const auto c = fixtures::all_ones();
  const auto tv = terminal_values(c, Regime::finite(4));
  EXPECT_DOUBLE_EQ(tv.P, 0.75);
  EXPECT_DOUBLE_EQ(tv.K, -0.75);
  EXPECT_DOUBLE_EQ(tv.phi, -0.75);
}

TEST(Riccati, SingularGainNamesTheTime) {
  CoefficientSet c = fixtures::all_ones();
  c.R = 0.0;
  c.D = 0.0;
  const TimeGrid g(1.0, 10);
  try {
    solve_limit(c, g);
    FAIL() << "expected SingularGainError";
  } catch (const SingularGainError& e) {
    EXPECT_NE(std::string(e.what()).find("at t = "), std::string::npos) << e.what();
    EXPECT_EQ(e.time(), 1.0);
  }
}

// R = -1, D = 0, A = 0, Q = 1: backward in time P = tan(T - t), which
// leaves every bound before T - t = pi/2.
TEST(Riccati, FiniteTimeBlowUpIsReported) {
  CoefficientSet c = CoefficientSet::uniform(0.0);
  c.B = 1.0;
  c.Q = 1.0;
  c.R = -1.0;
  const TimeGrid g(2.0, 2000);
  try {
    solve_limit(c, g);
    FAIL() << "expected NonSolvableError";
  } catch (const NonSolvableError& e) {
    EXPECT_GT(e.time(), 2.0 - M_PI / 2 - 0.01);
    EXPECT_LT(e.time(), 2.0 - M_PI / 2 + 0.05);
  }
}

// R = -0.1 without coupling: the stationary P solves P^2 - 0.7P + 0.1 = 0 and
// the backward flow from P(T) = 1 settles on the root 0.5, where alpha = 0.4.
TEST(Riccati, IndefiniteWeightKeepsAlphaPositive) {
  CoefficientSet c = fixtures::no_coupling();
  c.R = -0.1;
  const TimeGrid g(10.0, 1000);
  const auto sol = solve_limit(c, g);
  const auto gs = gains(sol, c);
  for (std::size_t k = 0; k < g.size(); ++k) {
    EXPECT_GT(gs.alpha[k], 0.0);
    EXPECT_DOUBLE_EQ(gs.alpha[k], -0.1 + sol.P[k]);
  }
  EXPECT_NEAR(sol.P.front(), 0.5, 1e-2);
}

// With coupling, the same weight leaves the K equation without real
// equilibria (2.5K^2 + 3K + 1 > 0), so K escapes in finite time.
TEST(Riccati, IndefiniteWeightWithCouplingBlowsUp) {
  CoefficientSet c = fixtures::all_ones();
  c.R = -0.1;
  const TimeGrid g(10.0, 1000);
  try {
    solve_limit(c, g);
    FAIL() << "expected NonSolvableError";
  } catch (const NonSolvableError& e) {
    EXPECT_NE(std::string(e.what()).find("|K|"), std::string::npos) << e.what();
    EXPECT_GT(e.time(), 0.0);
  }
}

TEST(Riccati, GainFormulas) {
  const auto c = fixtures::all_ones();
  const TimeGrid g(1.0, 4);
  const auto v = c.at_node(g, 0);
  const auto limit = gain_values(v, 2.0, -1.0, 0.5, 0.0);
  EXPECT_DOUBLE_EQ(limit.alpha, 3.0);
  EXPECT_DOUBLE_EQ(limit.beta, 4.0);
  EXPECT_DOUBLE_EQ(limit.gamma, -1.0);
  EXPECT_DOUBLE_EQ(limit.delta, 2.5);
  const auto fin = gain_values(v, 2.0, -1.0, 0.5, 0.5);  // weight 1.5
  EXPECT_DOUBLE_EQ(fin.alpha, 2.5);
  EXPECT_DOUBLE_EQ(fin.beta, 3.5);
  EXPECT_DOUBLE_EQ(fin.gamma, -1.0);
  EXPECT_DOUBLE_EQ(fin.delta, 2.0);
}
