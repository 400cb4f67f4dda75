#include "phdnet/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <utility>
#include <vector>

namespace phdnet {

namespace {

// Union-find keeping the smallest member as root, so a component's
// representative falls out of find() directly.
struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(int n) : parent(n) {
    for (int i = 0; i < n; ++i) parent[i] = i;
  }
  int find(int a) {
    while (parent[a] != a) {
      parent[a] = parent[parent[a]];
      a = parent[a];
    }
    return a;
  }
  void unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (b < a) std::swap(a, b);
    parent[b] = a;
  }
};

// All-pairs scan; fastest up to a few hundred points.
void link_quadratic(const std::vector<Vec2>& pts, double tau2, UnionFind& uf) {
  const int n = static_cast<int>(pts.size());
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if ((pts[i] - pts[j]).squaredNorm() <= tau2) uf.unite(i, j);
}

// Components of the <=tau graph through a uniform grid. Cell side 0.7*tau
// keeps every same-cell pair within tau (diagonal ~0.99*tau), so a cell
// collapses into one component with no distance checks. Points within tau of
// each other sit at most two cells apart, so scanning the forward half of the
// 5x5 window with the exact d^2 <= tau^2 predicate finds every remaining edge
// exactly once per cell pair.
void link_gridded(const std::vector<Vec2>& pts, double tau, UnionFind& uf) {
  const double cell = 0.7 * tau;
  const double tau2 = tau * tau;
  std::map<std::pair<long long, long long>, std::vector<int>> grid;
  for (int i = 0; i < static_cast<int>(pts.size()); ++i) {
    const std::pair<long long, long long> key{
        static_cast<long long>(std::floor(pts[i].x() / cell)),
        static_cast<long long>(std::floor(pts[i].y() / cell))};
    grid[key].push_back(i);
  }
  for (const auto& [key, members] : grid)
    for (std::size_t i = 1; i < members.size(); ++i) uf.unite(members[0], members[i]);
  static constexpr int kForward[12][2] = {{1, 0},  {2, 0},  {-2, 1}, {-1, 1},
                                          {0, 1},  {1, 1},  {2, 1},  {-2, 2},
                                          {-1, 2}, {0, 2},  {1, 2},  {2, 2}};
  for (const auto& [key, a] : grid) {
    for (const auto& off : kForward) {
      const auto it = grid.find({key.first + off[0], key.second + off[1]});
      if (it == grid.end()) continue;
      const auto& b = it->second;
      if (uf.find(a[0]) == uf.find(b[0])) continue;
      bool linked = false;
      for (int i : a) {
        for (int j : b) {
          if ((pts[i] - pts[j]).squaredNorm() <= tau2) {
            uf.unite(i, j);
            linked = true;
            break;
          }
        }
        if (linked) break;
      }
    }
  }
}

}  // namespace

LinkageResult single_linkage(const std::vector<Vec2>& pts, double tau, int max_clusters) {
  const int n = static_cast<int>(pts.size());
  LinkageResult res;
  if (n == 0) return res;
  if (max_clusters < 1) max_clusters = 1;

  UnionFind uf(n);
  constexpr int kQuadraticLimit = 512;
  if (n <= kQuadraticLimit) {
    link_quadratic(pts, tau * tau, uf);
  } else if (tau == 0.0) {
    // Zero cut joins only coincident points.
    std::map<std::pair<double, double>, int> first;
    for (int i = 0; i < n; ++i) {
      auto [it, inserted] = first.try_emplace({pts[i].x(), pts[i].y()}, i);
      if (!inserted) uf.unite(it->second, i);
    }
  } else {
    link_gridded(pts, std::abs(tau), uf);
  }

  // Components ordered by smallest member (the root is that member).
  std::vector<int> owner(n);
  std::vector<std::vector<int>> comps;
  {
    std::map<int, int> index_of_root;
    for (int i = 0; i < n; ++i) {
      const int r = uf.find(i);
      auto [it, inserted] = index_of_root.try_emplace(r, static_cast<int>(comps.size()));
      if (inserted) comps.emplace_back();
      comps[it->second].push_back(i);
      owner[i] = it->second;
    }
  }

  // Every within-tau merge precedes any cap merge (the closest pair only
  // exceeds tau once no within-tau pair is left), so the cap phase can run on
  // whole components: repeatedly merge the globally closest pair, ties to the
  // lexicographically smallest representatives, until the count fits.
  int alive = static_cast<int>(comps.size());
  if (alive > max_clusters) {
    const int m = alive;
    Eigen::MatrixXd d2 = Eigen::MatrixXd::Zero(m, m);
    for (int a = 0; a < m; ++a) {
      for (int b = a + 1; b < m; ++b) {
        double best = std::numeric_limits<double>::infinity();
        for (int i : comps[a])
          for (int j : comps[b]) best = std::min(best, (pts[i] - pts[j]).squaredNorm());
        d2(a, b) = best;
        d2(b, a) = best;
      }
    }
    std::vector<char> dead(m, 0);
    std::vector<int> rep(m);
    for (int a = 0; a < m; ++a) rep[a] = comps[a].front();
    while (alive > max_clusters) {
      double best = std::numeric_limits<double>::infinity();
      int ba = -1, bb = -1;
      for (int a = 0; a < m; ++a) {
        if (dead[a]) continue;
        for (int b = a + 1; b < m; ++b) {
          if (dead[b]) continue;
          // rep[a] < rep[b]: components start ordered by smallest member and
          // merges keep the smaller representative in place.
          if (d2(a, b) < best ||
              (ba >= 0 && d2(a, b) == best &&
               (rep[a] < rep[ba] || (rep[a] == rep[ba] && rep[b] < rep[bb])))) {
            best = d2(a, b);
            ba = a;
            bb = b;
          }
        }
      }
      for (int c = 0; c < m; ++c) {
        if (dead[c] || c == ba || c == bb) continue;
        const double nd = std::min(d2(ba, c), d2(bb, c));
        d2(ba, c) = nd;
        d2(c, ba) = nd;
      }
      comps[ba].insert(comps[ba].end(), comps[bb].begin(), comps[bb].end());
      dead[bb] = 1;
      --alive;
    }
    for (int a = 0; a < m; ++a) {
      if (dead[a]) continue;
      for (int i : comps[a]) owner[i] = a;
    }
  }

  res.labels.assign(n, -1);
  std::vector<int> renumber(comps.size(), -1);
  int next = 0;
  for (int i = 0; i < n; ++i) {
    int& r = renumber[owner[i]];
    if (r < 0) r = next++;
    res.labels[i] = r;
  }
  res.n_clusters = next;
  return res;
}

std::vector<Vec4> cluster_centroids(const Eigen::Matrix4Xd& states, const Eigen::VectorXd& w,
                                    const LinkageResult& partition, bool weighted) {
  const int n = static_cast<int>(partition.labels.size());
  std::vector<Vec4> sum(partition.n_clusters, Vec4::Zero());
  std::vector<Vec4> plain(partition.n_clusters, Vec4::Zero());
  std::vector<double> mass(partition.n_clusters, 0.0);
  std::vector<int> count(partition.n_clusters, 0);
  for (int i = 0; i < n; ++i) {
    const int c = partition.labels[i];
    const double wi = weighted ? w(i) : 1.0;
    sum[c] += wi * states.col(i);
    mass[c] += wi;
    plain[c] += states.col(i);
    ++count[c];
  }
  std::vector<Vec4> out(partition.n_clusters, Vec4::Zero());
  for (int c = 0; c < partition.n_clusters; ++c) {
    if (mass[c] > 0.0)
      out[c] = sum[c] / mass[c];
    else if (count[c] > 0)  // zero total weight: fall back to the plain mean
      out[c] = plain[c] / count[c];
  }
  return out;
}

KmeansResult kmeans(const Eigen::Matrix4Xd& states, const Eigen::VectorXd& w, int k,
                    int max_iter) {
  KmeansResult res;
  const int n = static_cast<int>(states.cols());
  if (n == 0 || k <= 0) return res;
  k = std::min(k, n);

  Eigen::VectorXd wu = w;
  if (wu.sum() <= 0.0) wu = Eigen::VectorXd::Constant(n, 1.0);

  const Eigen::Matrix2Xd pos = states.topRows<2>();

  // First seed: the point closest to the weighted position mean. Further
  // seeds by farthest-point; every tie resolves to the smallest index.
  std::vector<Vec2> centers;
  centers.reserve(k);
  {
    const Vec2 mean = (pos * wu).eval() / wu.sum();
    int best = 0;
    double bd = std::numeric_limits<double>::infinity();
    for (int i = 0; i < n; ++i) {
      const double d = (pos.col(i) - mean).squaredNorm();
      if (d < bd) {
        bd = d;
        best = i;
      }
    }
    centers.push_back(pos.col(best));
  }
  while (static_cast<int>(centers.size()) < k) {
    int best = 0;
    double bd = -1.0;
    for (int i = 0; i < n; ++i) {
      double near = std::numeric_limits<double>::infinity();
      for (const auto& c : centers) near = std::min(near, (pos.col(i) - c).squaredNorm());
      if (near > bd) {
        bd = near;
        best = i;
      }
    }
    centers.push_back(pos.col(best));
  }

  std::vector<int> labels(n, -1);
  for (int iter = 0; iter < max_iter; ++iter) {
    bool changed = false;
    for (int i = 0; i < n; ++i) {
      int best = 0;
      double bd = std::numeric_limits<double>::infinity();
      for (int c = 0; c < k; ++c) {
        const double d = (pos.col(i) - centers[c]).squaredNorm();
        if (d < bd) {
          bd = d;
          best = c;
        }
      }
      if (labels[i] != best) {
        labels[i] = best;
        changed = true;
      }
    }
    // An empty cluster grabs the point farthest from its assigned center.
    std::vector<int> sizes(k, 0);
    for (int i = 0; i < n; ++i) ++sizes[labels[i]];
    for (int c = 0; c < k; ++c) {
      if (sizes[c] > 0) continue;
      int far = -1;
      double fd = -1.0;
      for (int i = 0; i < n; ++i) {
        if (sizes[labels[i]] <= 1) continue;  // do not empty another cluster
        const double d = (pos.col(i) - centers[labels[i]]).squaredNorm();
        if (d > fd) {
          fd = d;
          far = i;
        }
      }
      if (far < 0) break;
      --sizes[labels[far]];
      labels[far] = c;
      ++sizes[c];
      changed = true;
    }
    std::vector<Vec2> sums(k, Vec2::Zero());
    std::vector<double> mass(k, 0.0);
    for (int i = 0; i < n; ++i) {
      sums[labels[i]] += wu(i) * pos.col(i);
      mass[labels[i]] += wu(i);
    }
    for (int c = 0; c < k; ++c)
      if (mass[c] > 0.0) centers[c] = sums[c] / mass[c];
    if (!changed && iter > 0) break;
  }

  res.labels = labels;
  res.centroids.assign(k, Vec4::Zero());
  std::vector<double> mass(k, 0.0);
  std::vector<int> count(k, 0);
  std::vector<Vec4> plain(k, Vec4::Zero());
  for (int i = 0; i < n; ++i) {
    res.centroids[labels[i]] += wu(i) * states.col(i);
    mass[labels[i]] += wu(i);
    plain[labels[i]] += states.col(i);
    ++count[labels[i]];
  }
  for (int c = 0; c < k; ++c) {
    if (mass[c] > 0.0)
      res.centroids[c] /= mass[c];
    else if (count[c] > 0)
      res.centroids[c] = plain[c] / count[c];
  }
  return res;
}

}  // namespace phdnet
