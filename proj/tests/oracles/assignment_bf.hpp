#pragma once

// Reference implementations used only by tests. Exhaustive minimum-cost
// assignment: every row paired with a distinct column, rows <= cols after
// transpose, feasible up to ~8x8.

#include <Eigen/Dense>
#include <limits>
#include <vector>

namespace oracle {

inline double assignment_bf_rec(const Eigen::MatrixXd& c, int row, std::vector<bool>& used) {
  const int m = static_cast<int>(c.rows());
  const int n = static_cast<int>(c.cols());
  if (row == m) return 0.0;
  double best = std::numeric_limits<double>::infinity();
  for (int j = 0; j < n; ++j) {
    if (used[j]) continue;
    used[j] = true;
    const double rest = assignment_bf_rec(c, row + 1, used);
    used[j] = false;
    best = std::min(best, c(row, j) + rest);
  }
  return best;
}

inline double assignment_bf(const Eigen::MatrixXd& cost) {
  if (cost.rows() == 0 || cost.cols() == 0) return 0.0;
  if (cost.rows() > cost.cols()) {
    const Eigen::MatrixXd t = cost.transpose();
    std::vector<bool> used(t.cols(), false);
    return assignment_bf_rec(t, 0, used);
  }
  std::vector<bool> used(cost.cols(), false);
  return assignment_bf_rec(cost, 0, used);
}

}  // namespace oracle
