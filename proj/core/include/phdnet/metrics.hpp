#pragma once

#include <vector>

#include "phdnet/common.hpp"

namespace phdnet {

// Minimum-cost rectangular assignment (rows <= cols after internal
// transpose); every row is assigned to a distinct column. Augmenting-path
// shortest-path variant, O(n^3).
double assignment_cost(const Eigen::MatrixXd& cost);

// OSPA distance of order p with cutoff c between two 2D point sets.
// Both empty -> 0; exactly one empty -> c.
double ospa(const std::vector<Vec2>& a, const std::vector<Vec2>& b, double c, double p);

// Cardinality-scaled squared OSPA: |truth| * ospa^2 (0 when truth is empty).
double ospa_scaled_sq(const std::vector<Vec2>& est, const std::vector<Vec2>& truth, double c,
                      double p);

}  // namespace phdnet
