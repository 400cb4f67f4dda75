#include "phdnet/dynamics.hpp"

#include <algorithm>
#include <fstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace phdnet {

Mat4 CvModel::F() const {
  Mat4 f = Mat4::Identity();
  f(0, 2) = dt;
  f(1, 3) = dt;
  return f;
}

Mat42 CvModel::G() const {
  Mat42 g = Mat42::Zero();
  g(0, 0) = 0.5 * dt * dt;
  g(1, 1) = 0.5 * dt * dt;
  g(2, 0) = dt;
  g(3, 1) = dt;
  return g;
}

Mat4 CvModel::GQGt() const {
  const Mat42 g = G();
  return sigma_q2 * (g * g.transpose());
}

bool TargetTrack::alive(int step) const {
  return step >= entry_step && step <= last_step();
}

Vec4 TargetTrack::state(int step) const {
  const int i = step - entry_step;
  const int n = static_cast<int>(waypoints.size());
  Vec4 s;
  s.head<2>() = waypoints[i];
  if (n < 2) {
    s.tail<2>().setZero();
  } else if (i + 1 < n) {
    s.tail<2>() = waypoints[i + 1] - waypoints[i];
  } else {
    s.tail<2>() = waypoints[n - 1] - waypoints[n - 2];
  }
  return s;
}

int Scenario::last_step() const {
  int last = -1;
  for (const auto& t : targets) last = std::max(last, t.last_step());
  return last;
}

std::vector<int> Scenario::alive_ids(int step) const {
  std::vector<int> ids;
  for (const auto& t : targets)
    if (t.alive(step)) ids.push_back(t.id);
  return ids;
}

std::vector<Vec4> Scenario::true_states(int step) const {
  std::vector<Vec4> out;
  for (const auto& t : targets)
    if (t.alive(step)) out.push_back(t.state(step));
  return out;
}

std::vector<Vec2> Scenario::true_positions(int step) const {
  std::vector<Vec2> out;
  for (const auto& t : targets)
    if (t.alive(step)) out.push_back(t.state(step).head<2>());
  return out;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open scenario file: " + path);
  nlohmann::json j;
  in >> j;
  Scenario sc;
  for (const auto& jt : j.at("targets")) {
    TargetTrack t;
    t.id = jt.at("id").get<int>();
    t.entry_step = jt.at("entry_step").get<int>();
    for (const auto& w : jt.at("waypoints"))
      t.waypoints.push_back(Vec2{w.at(0).get<double>(), w.at(1).get<double>()});
    sc.targets.push_back(std::move(t));
  }
  return sc;
}

void save_scenario(const Scenario& scenario, const std::string& path) {
  nlohmann::json j;
  j["targets"] = nlohmann::json::array();
  for (const auto& t : scenario.targets) {
    nlohmann::json jt;
    jt["id"] = t.id;
    jt["entry_step"] = t.entry_step;
    jt["waypoints"] = nlohmann::json::array();
    for (const auto& w : t.waypoints) jt["waypoints"].push_back({w.x(), w.y()});
    j["targets"].push_back(std::move(jt));
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write scenario file: " + path);
  out << j.dump(1) << '\n';
}

Scenario make_three_target_scenario() {
  // Waypoints as literals so the builder is bit-identical to the shipped
  // file regardless of compiler floating-point contraction.
  Scenario sc;
  TargetTrack t1;
  t1.id = 1;
  t1.entry_step = 0;
  t1.waypoints = {
      {2.7, 25.0}, {2.95, 23.55}, {3.2, 22.1},
      {3.45, 20.65}, {3.7, 19.2}, {3.95, 17.75},
      {4.2, 16.3}, {4.45, 14.85}, {4.7, 13.4},
      {4.95, 11.950000000000001}, {5.2, 10.5}, {5.45, 9.05},
      {5.7, 7.600000000000001}, {5.95, 6.150000000000002}, {6.2, 4.699999999999999},
      {6.45, 3.25}, {6.7, 1.8000000000000007}, {6.95, 0.3500000000000014},
      {7.2, -1.0999999999999979}, {7.45, -2.5500000000000007}, {7.7, -4.0},
      {7.95, -5.449999999999999}, {8.2, -6.899999999999999}, {8.45, -8.350000000000001},
      {8.7, -9.799999999999997}, {8.95, -11.25}, {9.2, -12.699999999999996},
      {9.45, -14.149999999999999}, {9.7, -15.600000000000001}, {9.95, -17.049999999999997},
      {10.2, -18.5},
  };
  TargetTrack t2;
  t2.id = 2;
  t2.entry_step = 9;
  t2.waypoints = {
      {-17.28, -25.0}, {-17.220000000000002, -23.3}, {-17.16, -21.6},
      {-17.1, -19.9}, {-17.040000000000003, -18.2}, {-16.98, -16.5},
      {-16.92, -14.8}, {-16.86, -13.1}, {-16.8, -11.4},
      {-16.740000000000002, -9.700000000000001}, {-16.68, -8.0}, {-16.62, -6.300000000000001},
      {-16.560000000000002, -4.600000000000001}, {-16.5, -2.900000000000002}, {-16.44, -1.1999999999999993},
      {-16.69, 0.5300000000000007}, {-17.25, 2.290000000000001}, {-18.12, 4.080000000000001},
      {-18.990000000000002, 5.870000000000001}, {-19.860000000000003, 7.660000000000001}, {-20.730000000000004, 9.450000000000001},
      {-21.600000000000005, 11.240000000000002},
  };
  TargetTrack t3;
  t3.id = 3;
  t3.entry_step = 14;
  t3.waypoints = {
      {-25.0, -2.26}, {-23.94, -2.3899999999999997}, {-22.88, -2.5199999999999996},
      {-21.82, -2.65}, {-20.759999999999998, -2.78}, {-19.7, -2.9099999999999997},
      {-18.64, -3.04}, {-17.58, -3.17}, {-16.52, -3.3},
      {-15.459999999999999, -3.4299999999999997}, {-14.149999999999999, -3.76}, {-12.589999999999998, -4.29},
      {-10.779999999999998, -5.02}, {-8.969999999999997, -5.75}, {-7.159999999999997, -6.48},
      {-5.349999999999996, -7.210000000000001}, {-3.539999999999996, -7.940000000000001},
  };
  sc.targets = {std::move(t1), std::move(t2), std::move(t3)};
  return sc;
}

}  // namespace phdnet
