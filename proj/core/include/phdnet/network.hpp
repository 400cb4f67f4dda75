#pragma once

#include <optional>
#include <string>
#include <vector>

#include "phdnet/common.hpp"

namespace phdnet {

struct Node {
  int id = 0;  // 1-based external id
  Vec2 pos = Vec2::Zero();
  double r_sen = 6.0;
  double r_com = 12.0;
};

struct Roi {
  double xmin = 0, xmax = 0, ymin = 0, ymax = 0;

  bool contains(const Vec2& p) const {
    return p.x() >= xmin && p.x() <= xmax && p.y() >= ymin && p.y() <= ymax;
  }
  double width() const { return xmax - xmin; }
  double height() const { return ymax - ymin; }
};

// Static sensor network: node positions, disk sensing footprints and a disk
// communication graph. Neighborhoods always include the node itself.
class SensorNetwork {
 public:
  SensorNetwork() = default;
  // Without an explicit ROI the node bounding box inflated by the maximum
  // sensing radius is used.
  SensorNetwork(std::vector<Node> nodes, std::optional<Roi> roi = std::nullopt);

  int size() const { return static_cast<int>(nodes_.size()); }
  const Node& node(int k) const { return nodes_[k]; }
  const std::vector<Node>& nodes() const { return nodes_; }
  const Roi& roi() const { return roi_; }

  // Sorted node indices within r_com of k, k included.
  const std::vector<int>& neighbors(int k) const { return neighbors_[k]; }
  // Union of neighbors(l) over l in neighbors(k), sorted, k included.
  const std::vector<int>& two_hop(int k) const { return two_hop_[k]; }

  bool in_fov(int k, const Vec2& p) const;
  std::vector<int> covering(const Vec2& p) const;

  // Fraction of ROI grid points (spacing `res`, cell centers) inside at
  // least one sensing disk.
  double coverage_ratio(double res = 0.5) const;
  bool connected() const;

 private:
  std::vector<Node> nodes_;
  Roi roi_;
  std::vector<std::vector<int>> neighbors_;
  std::vector<std::vector<int>> two_hop_;
};

SensorNetwork load_layout(const std::string& path);
void save_layout(const SensorNetwork& net, const std::string& path);

// Built-in 30-node layout over [-25,25]^2 with r_sen=6, r_com=12; covers
// 99.8% of the ROI, double-covers the first four steps of every scenario
// track and hands each track from disk to disk within communication reach.
// Identical to data/layouts/grid30.json.
SensorNetwork make_grid30_layout();

// Small fully-overlapping topology used by equivalence checks: a 3x3 grid,
// spacing `pitch`, every node hearing every other when r_com >= graph
// diameter.
SensorNetwork make_grid9_layout(double pitch = 18.0, double r_sen = 14.0, double r_com = 60.0);

}  // namespace phdnet
