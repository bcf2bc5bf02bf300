#include <gtest/gtest.h>

#include <cmath>

#include "lqmfg/error.hpp"
#include "lqmfg/model.hpp"

using namespace lqmfg;

TEST(TimeGrid, RejectsDegenerateGrids) {
  EXPECT_THROW(TimeGrid(1.0, 1), ConfigurationError);
  EXPECT_THROW(TimeGrid(0.0, 10), ConfigurationError);
  EXPECT_THROW(TimeGrid(-1.0, 10), ConfigurationError);
  EXPECT_THROW(TimeGrid(NAN, 10), ConfigurationError);
}

TEST(TimeGrid, LastNodeIsExactlyTheHorizon) {
  const TimeGrid g(0.3, 7);
  EXPECT_EQ(g.size(), 8u);
  EXPECT_EQ(g.node(7), 0.3);
  EXPECT_DOUBLE_EQ(g.node(3), 3 * 0.3 / 7);
  EXPECT_THROW(g.node(8), OutOfRangeError);
  EXPECT_EQ(g.nodes().back(), 0.3);
}

TEST(TimeProfile, ConstantEverywhere) {
  const TimeGrid g(2.0, 4);
  const TimeProfile p = 3.5;
  EXPECT_EQ(p.at_node(g, 2), 3.5);
  EXPECT_EQ(p.at_midpoint(g, 1), 3.5);
  EXPECT_EQ(p.eval(g, 1.23), 3.5);
}

TEST(TimeProfile, SampledIsPiecewiseLinear) {
  const TimeGrid g(2.0, 4);
  const auto p = TimeProfile::sampled({0.0, 1.0, 4.0, 9.0, 16.0});
  EXPECT_EQ(p.eval(g, 1.0), 4.0);
  EXPECT_EQ(p.eval(g, 2.0), 16.0);
  EXPECT_DOUBLE_EQ(p.eval(g, 0.75), 2.5);
  EXPECT_DOUBLE_EQ(p.at_midpoint(g, 2), 6.5);
  EXPECT_THROW(p.eval(g, 2.5), OutOfRangeError);
  EXPECT_THROW(p.eval(g, -0.1), OutOfRangeError);
  EXPECT_TRUE(p.aligned_with(g));
  EXPECT_FALSE(p.aligned_with(TimeGrid(2.0, 5)));
}

TEST(InitialLaw, Moments) {
  const auto u = InitialLaw::uniform(0.0, 20.0);
  EXPECT_DOUBLE_EQ(u.mean(), 10.0);
  EXPECT_DOUBLE_EQ(u.second_moment(), 400.0 / 3.0);
  EXPECT_DOUBLE_EQ(u.sample(0.25, 0.0), 5.0);
  const auto n = InitialLaw::gaussian(1.0, 4.0);
  EXPECT_DOUBLE_EQ(n.second_moment(), 5.0);
  EXPECT_DOUBLE_EQ(n.sample(0.5, -1.0), -1.0);
  EXPECT_EQ(InitialLaw::point(2.0).sample(0.9, 3.0), 2.0);
}

TEST(Validate, ReferenceModelSatisfiesAssumptions) {
  const auto r = validate(CoefficientSet::uniform(1.0), TimeGrid(10.0, 100));
  EXPECT_TRUE(r.a3_holds());
  EXPECT_FALSE(r.indefinite_control_weight);
  EXPECT_TRUE(r.notes.empty());
}

TEST(Validate, NegativeControlWeightIsFlaggedNotRejected) {
  auto c = CoefficientSet::uniform(1.0);
  c.R = -0.1;
  const auto r = validate(c, TimeGrid(1.0, 10));
  EXPECT_TRUE(r.a3_holds());
  EXPECT_TRUE(r.indefinite_control_weight);
  EXPECT_EQ(r.min_R, -0.1);
  EXPECT_FALSE(r.notes.empty());
}

TEST(Validate, NegativeStateWeightViolatesAssumption) {
  auto c = CoefficientSet::uniform(1.0);
  c.Q = TimeProfile::sampled({1.0, -0.5, 1.0});
  const auto r = validate(c, TimeGrid(1.0, 2));
  EXPECT_FALSE(r.a3_holds());
  EXPECT_EQ(r.min_Q, -0.5);
}

TEST(Validate, MalformedProfiles) {
  auto c = CoefficientSet::uniform(1.0);
  c.A = TimeProfile::sampled({1.0, 2.0, 3.0});
  EXPECT_THROW(validate(c, TimeGrid(1.0, 4)), MalformedModelError);
  c.A = NAN;
  EXPECT_THROW(validate(c, TimeGrid(1.0, 4)), MalformedModelError);
  c.A = 1.0;
  c.H = INFINITY;
  EXPECT_THROW(validate(c, TimeGrid(1.0, 4)), MalformedModelError);
}
