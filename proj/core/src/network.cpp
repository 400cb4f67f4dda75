#include "phdnet/network.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <fstream>
#include <limits>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace phdnet {

SensorNetwork::SensorNetwork(std::vector<Node> nodes, std::optional<Roi> roi)
    : nodes_(std::move(nodes)) {
  if (roi) {
    roi_ = *roi;
  } else if (!nodes_.empty()) {
    double xmin = std::numeric_limits<double>::infinity();
    double xmax = -xmin, ymin = xmin, ymax = -xmin, rmax = 0.0;
    for (const auto& n : nodes_) {
      xmin = std::min(xmin, n.pos.x());
      xmax = std::max(xmax, n.pos.x());
      ymin = std::min(ymin, n.pos.y());
      ymax = std::max(ymax, n.pos.y());
      rmax = std::max(rmax, n.r_sen);
    }
    roi_ = Roi{xmin - rmax, xmax + rmax, ymin - rmax, ymax + rmax};
  }
  const int n = size();
  neighbors_.resize(n);
  two_hop_.resize(n);
  for (int k = 0; k < n; ++k) {
    for (int l = 0; l < n; ++l)
      if ((nodes_[l].pos - nodes_[k].pos).norm() <= nodes_[k].r_com)
        neighbors_[k].push_back(l);
  }
  for (int k = 0; k < n; ++k) {
    std::vector<char> seen(n, 0);
    for (int l : neighbors_[k])
      for (int m : neighbors_[l]) seen[m] = 1;
    for (int m = 0; m < n; ++m)
      if (seen[m]) two_hop_[k].push_back(m);
  }
}

bool SensorNetwork::in_fov(int k, const Vec2& p) const {
  return (p - nodes_[k].pos).norm() <= nodes_[k].r_sen;
}

std::vector<int> SensorNetwork::covering(const Vec2& p) const {
  std::vector<int> out;
  for (int k = 0; k < size(); ++k)
    if (in_fov(k, p)) out.push_back(k);
  return out;
}

double SensorNetwork::coverage_ratio(double res) const {
  const int nx = static_cast<int>(std::llround(roi_.width() / res));
  const int ny = static_cast<int>(std::llround(roi_.height() / res));
  if (nx <= 0 || ny <= 0) return 0.0;
  long covered = 0;
  for (int i = 0; i < nx; ++i) {
    for (int j = 0; j < ny; ++j) {
      const Vec2 p{roi_.xmin + (i + 0.5) * res, roi_.ymin + (j + 0.5) * res};
      for (int k = 0; k < size(); ++k) {
        if (in_fov(k, p)) {
          ++covered;
          break;
        }
      }
    }
  }
  return static_cast<double>(covered) / (static_cast<double>(nx) * ny);
}

bool SensorNetwork::connected() const {
  if (nodes_.empty()) return true;
  std::vector<char> seen(size(), 0);
  std::deque<int> frontier{0};
  seen[0] = 1;
  int reached = 1;
  while (!frontier.empty()) {
    const int k = frontier.front();
    frontier.pop_front();
    for (int l : neighbors_[k]) {
      if (!seen[l]) {
        seen[l] = 1;
        ++reached;
        frontier.push_back(l);
      }
    }
  }
  return reached == size();
}

SensorNetwork load_layout(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open layout file: " + path);
  nlohmann::json j;
  in >> j;
  std::vector<Node> nodes;
  for (const auto& jn : j.at("nodes")) {
    Node n;
    n.id = jn.at("id").get<int>();
    n.pos = Vec2{jn.at("x").get<double>(), jn.at("y").get<double>()};
    n.r_sen = jn.at("r_sen").get<double>();
    n.r_com = jn.at("r_com").get<double>();
    nodes.push_back(n);
  }
  std::optional<Roi> roi;
  if (j.contains("roi")) {
    const auto& jr = j.at("roi");
    roi = Roi{jr.at("xmin").get<double>(), jr.at("xmax").get<double>(),
              jr.at("ymin").get<double>(), jr.at("ymax").get<double>()};
  }
  return SensorNetwork(std::move(nodes), roi);
}

void save_layout(const SensorNetwork& net, const std::string& path) {
  nlohmann::json j;
  j["roi"] = {{"xmin", net.roi().xmin},
              {"xmax", net.roi().xmax},
              {"ymin", net.roi().ymin},
              {"ymax", net.roi().ymax}};
  j["nodes"] = nlohmann::json::array();
  for (const auto& n : net.nodes()) {
    j["nodes"].push_back({{"id", n.id},
                          {"x", n.pos.x()},
                          {"y", n.pos.y()},
                          {"r_sen", n.r_sen},
                          {"r_com", n.r_com}});
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write layout file: " + path);
  out << j.dump(1) << '\n';
}

SensorNetwork make_grid30_layout() {
  // Positions as literals so the builder is bit-identical to the shipped file.
  std::vector<Node> nodes = {
      {1, {-12.75, -21.5625}, 6.0, 12.0},
      {2, {-1.375, -21.65}, 6.0, 12.0},
      {3, {19.375, -21.75}, 6.0, 12.0},
      {4, {9.225, -21.5}, 6.0, 12.0},
      {5, {-21.0, -20.875}, 6.0, 12.0},
      {6, {-19.125, -13.24375}, 6.0, 12.0},
      {7, {-7.75, -12.9}, 6.0, 12.0},
      {8, {23.5, -12.9}, 6.0, 12.0},
      {9, {3.5, -12.4}, 6.0, 12.0},
      {10, {14.0, -11.9625}, 6.0, 12.0},
      {11, {-22.25, -6.112500000000001}, 6.0, 12.0},
      {12, {-11.875, -4.675000000000001}, 6.0, 12.0},
      {13, {-0.375, -4.175000000000001}, 6.0, 12.0},
      {14, {10.6, -3.3000000000000007}, 6.0, 12.0},
      {15, {21.0, -2.8000000000000007}, 6.0, 12.0},
      {16, {-21.5, 2.049999999999997}, 6.0, 12.0},
      {17, {-12.625, 4.987499999999997}, 6.0, 12.0},
      {18, {-3.375, 3.237499999999997}, 6.0, 12.0},
      {19, {7.85, 4.299999999999997}, 6.0, 12.0},
      {20, {19.25, 4.924999999999997}, 6.0, 12.0},
      {21, {-20.0, 11.899999999999999}, 6.0, 12.0},
      {22, {1.25, 12.524999999999999}, 6.0, 12.0},
      {23, {-8.5, 13.399999999999999}, 6.0, 12.0},
      {24, {12.25, 13.462499999999999}, 6.0, 12.0},
      {25, {22.75, 13.149999999999999}, 6.0, 12.0},
      {26, {-21.375, 20.5}, 6.0, 12.0},
      {27, {-12.25, 20.875}, 6.0, 12.0},
      {28, {19.125, 22.25}, 6.0, 12.0},
      {29, {7.53125, 22.03125}, 6.0, 12.0},
      {30, {-2.0, 21.96875}, 6.0, 12.0},
  };
  return SensorNetwork(std::move(nodes), Roi{-25.0, 25.0, -25.0, 25.0});
}

SensorNetwork make_grid9_layout(double pitch, double r_sen, double r_com) {
  std::vector<Node> nodes;
  int id = 1;
  for (int j = 0; j < 3; ++j)
    for (int i = 0; i < 3; ++i)
      nodes.push_back(Node{id++, Vec2{-pitch + i * pitch, -pitch + j * pitch}, r_sen, r_com});
  return SensorNetwork(std::move(nodes), Roi{-25.0, 25.0, -25.0, 25.0});
}

}  // namespace phdnet
