#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "lqmfg/model.hpp"

namespace lqmfg::fixtures {

/// A = C = D = 0, B = Q = R = 1, H = 0: P(t) = tanh(T - t).
inline CoefficientSet tanh_model() {
  CoefficientSet c = CoefficientSet::uniform(0.0);
  c.B = 1.0;
  c.Q = 1.0;
  c.R = 1.0;
  return c;
}

inline CoefficientSet all_ones() { return CoefficientSet::uniform(1.0); }

inline CoefficientSet no_coupling() {
  CoefficientSet c = all_ones();
  c.Gamma = 0.0;
  c.Gamma0 = 0.0;
  return c;
}

/// Q = H = 0, R = -1: the second-variation form is strictly negative for any nonzero control.
inline CoefficientSet concave_model() {
  CoefficientSet c = all_ones();
  c.Q = 0.0;
  c.H = 0.0;
  c.R = -1.0;
  return c;
}

inline double sup_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::fabs(a[i] - b[i]));
  return m;
}

}  // namespace lqmfg::fixtures
