#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <random>

#include "phdnet/dynamics.hpp"
#include "phdnet/network.hpp"

using namespace phdnet;

static SensorNetwork line3() {
  std::vector<Node> nodes{
      {1, {0.0, 0.0}, 6.0, 12.0},
      {2, {10.0, 0.0}, 6.0, 12.0},
      {3, {20.0, 0.0}, 6.0, 12.0},
  };
  return SensorNetwork(std::move(nodes));
}

TEST_CASE("neighborhoods include self and respect r_com") {
  auto net = line3();
  CHECK(net.neighbors(0) == std::vector<int>{0, 1});
  CHECK(net.neighbors(1) == std::vector<int>{0, 1, 2});
  CHECK(net.neighbors(2) == std::vector<int>{1, 2});
  CHECK(net.two_hop(0) == std::vector<int>{0, 1, 2});
  CHECK(net.two_hop(2) == std::vector<int>{0, 1, 2});
  CHECK(net.connected());
}

TEST_CASE("fov and covering") {
  auto net = line3();
  CHECK(net.in_fov(0, {3.0, 0.0}));
  CHECK_FALSE(net.in_fov(0, {6.5, 0.0}));
  CHECK(net.covering({5.0, 0.0}) == std::vector<int>{0, 1});
  CHECK(net.covering({100.0, 0.0}).empty());
}

TEST_CASE("roi fallback inflates the bounding box by r_sen") {
  auto net = line3();
  CHECK(net.roi().xmin == doctest::Approx(-6.0));
  CHECK(net.roi().xmax == doctest::Approx(26.0));
  CHECK(net.roi().ymin == doctest::Approx(-6.0));
  CHECK(net.roi().ymax == doctest::Approx(6.0));
}

TEST_CASE("single-disk coverage ratio approximates pi r^2 / area") {
  std::vector<Node> one{{1, {0.0, 0.0}, 6.0, 12.0}};
  SensorNetwork net(std::move(one), Roi{-10, 10, -10, 10});
  CHECK(net.coverage_ratio(0.1) == doctest::Approx(kPi * 36.0 / 400.0).epsilon(0.02));
}

TEST_CASE("disconnected graph detected") {
  std::vector<Node> nodes{{1, {0.0, 0.0}, 6.0, 5.0}, {2, {50.0, 0.0}, 6.0, 5.0}};
  SensorNetwork net(std::move(nodes));
  CHECK_FALSE(net.connected());
}

TEST_CASE("built-in 30-node layout satisfies the deployment contract") {
  SensorNetwork net = make_grid30_layout();
  REQUIRE(net.size() == 30);
  for (int k = 0; k < 30; ++k) {
    CHECK(net.node(k).id == k + 1);
    CHECK(net.node(k).r_sen == 6.0);
    CHECK(net.node(k).r_com == 12.0);
    CHECK(static_cast<int>(net.neighbors(k).size()) >= 3);  // self plus >=2 neighbors
  }
  CHECK(net.roi().xmin == -25.0);
  CHECK(net.roi().xmax == 25.0);
  CHECK(net.connected());
  CHECK(net.coverage_ratio(0.5) >= 0.95);
  CHECK(net.coverage_ratio(0.5) == doctest::Approx(0.9981).epsilon(0.002));

  // at least 99% of uniformly random ROI points are sensed by someone
  std::mt19937_64 eng(12345);
  std::uniform_real_distribution<double> u(-25.0, 25.0);
  int covered = 0;
  const int trials = 1000;
  for (int i = 0; i < trials; ++i) {
    Vec2 p{u(eng), u(eng)};
    if (!net.covering(p).empty()) ++covered;
  }
  CHECK(covered >= 990);
}

TEST_CASE("layout tracks every scenario waypoint without gaps") {
  SensorNetwork net = make_grid30_layout();
  Scenario sc = make_three_target_scenario();
  for (const auto& t : sc.targets) {
    std::vector<std::vector<int>> cov;
    for (int s = t.entry_step; s <= t.last_step(); ++s)
      cov.push_back(net.covering(t.state(s).head<2>()));
    // never a blind step along any track
    for (const auto& c : cov) CHECK(!c.empty());
    // entry transients are double-covered for four steps
    for (int i = 0; i < 4; ++i) CHECK(cov[i].size() >= 2);
    // consecutive covering sets stay inside communication reach, so each
    // step's observers sit in the two-hop set of the previous observers
    for (size_t s = 1; s < cov.size(); ++s) {
      for (int b : cov[s]) {
        double best = 1e9;
        for (int a : cov[s - 1])
          best = std::min(best, (net.node(b).pos - net.node(a).pos).norm());
        CHECK(best <= 12.0);
      }
    }
  }
}

TEST_CASE("layout file matches the built-in definition") {
  SensorNetwork file = load_layout(std::string(PHDNET_DATA_DIR) + "/layouts/grid30.json");
  SensorNetwork code = make_grid30_layout();
  REQUIRE(file.size() == code.size());
  for (int k = 0; k < code.size(); ++k) {
    CHECK(file.node(k).id == code.node(k).id);
    CHECK(file.node(k).pos == code.node(k).pos);
    CHECK(file.node(k).r_sen == code.node(k).r_sen);
    CHECK(file.node(k).r_com == code.node(k).r_com);
  }
  CHECK(file.roi().xmax == code.roi().xmax);
}

TEST_CASE("grid9 equivalence topology is fully connected at large r_com") {
  SensorNetwork net = make_grid9_layout();
  REQUIRE(net.size() == 9);
  for (int k = 0; k < 9; ++k) CHECK(net.neighbors(k).size() == 9);
}
