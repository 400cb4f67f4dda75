#include "phdnet/metrics.hpp"

#include <cmath>
#include <limits>
#include <vector>

namespace phdnet {

double assignment_cost(const Eigen::MatrixXd& cost) {
  const Eigen::MatrixXd a =
      cost.rows() <= cost.cols() ? cost : Eigen::MatrixXd(cost.transpose());
  const int n = static_cast<int>(a.rows());
  const int m = static_cast<int>(a.cols());
  if (n == 0) return 0.0;

  constexpr double inf = std::numeric_limits<double>::infinity();
  // Shortest augmenting paths with row/column potentials; p[j] is the row
  // matched to column j, index 0 is the virtual unmatched slot.
  std::vector<double> u(n + 1, 0.0), v(m + 1, 0.0);
  std::vector<int> p(m + 1, 0), way(m + 1, 0);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::vector<double> minv(m + 1, inf);
    std::vector<char> used(m + 1, 0);
    do {
      used[j0] = 1;
      const int i0 = p[j0];
      int j1 = 0;
      double delta = inf;
      for (int j = 1; j <= m; ++j) {
        if (used[j]) continue;
        const double cur = a(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= m; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }

  double total = 0.0;
  for (int j = 1; j <= m; ++j)
    if (p[j] != 0) total += a(p[j] - 1, j - 1);
  return total;
}

double ospa(const std::vector<Vec2>& a, const std::vector<Vec2>& b, double c, double p) {
  const auto& small = a.size() <= b.size() ? a : b;
  const auto& big = a.size() <= b.size() ? b : a;
  const int m = static_cast<int>(small.size());
  const int n = static_cast<int>(big.size());
  if (n == 0) return 0.0;
  if (m == 0) return c;
  Eigen::MatrixXd cost(m, n);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j)
      cost(i, j) = std::pow(std::min(c, (small[i] - big[j]).norm()), p);
  const double total = assignment_cost(cost) + std::pow(c, p) * (n - m);
  return std::pow(total / n, 1.0 / p);
}

double ospa_scaled_sq(const std::vector<Vec2>& est, const std::vector<Vec2>& truth, double c,
                      double p) {
  if (truth.empty()) return 0.0;
  const double d = ospa(est, truth, c, p);
  return static_cast<double>(truth.size()) * d * d;
}

}  // namespace phdnet
