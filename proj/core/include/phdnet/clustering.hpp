#pragma once

#include <limits>
#include <vector>

#include "phdnet/common.hpp"

namespace phdnet {

struct LinkageResult {
  std::vector<int> labels;  // labels[i] in [0, n_clusters), numbered by first occurrence
  int n_clusters = 0;
};

// Single-linkage agglomeration on 2D points with a distance cut and a cluster
// cap. Merging continues while the closest pair of clusters is within `tau`
// OR more than `max_clusters` clusters remain; it stops once both the
// closest pair exceeds tau and the count fits the cap. Ties on distance merge
// the pair with the smallest representative ids; a cluster's representative
// is its smallest member index. Implemented as union-find over the distance-
// sorted edge list; produces the exact partition of the naive O(n^3)
// formulation.
LinkageResult single_linkage(const std::vector<Vec2>& pts, double tau,
                             int max_clusters = std::numeric_limits<int>::max());

// Per-cluster state means. Positions decide membership; centroids average the
// full 4D states, weighted unless `weighted` is false or all weights vanish.
std::vector<Vec4> cluster_centroids(const Eigen::Matrix4Xd& states, const Eigen::VectorXd& w,
                                    const LinkageResult& partition, bool weighted = true);

struct KmeansResult {
  std::vector<int> labels;
  std::vector<Vec4> centroids;  // weighted 4D means, position part is the k-means center
};

// Lloyd iterations on particle positions, k fixed, fully deterministic:
// first seed is the particle closest to the weighted mean, further seeds by
// farthest-point, ties to the smallest index. Empty clusters are reseeded at
// the point farthest from its center.
KmeansResult kmeans(const Eigen::Matrix4Xd& states, const Eigen::VectorXd& w, int k,
                    int max_iter = 50);

}  // namespace phdnet
