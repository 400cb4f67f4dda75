#pragma once

#include <string>
#include <vector>

#include "phdnet/common.hpp"

namespace phdnet {

// Nearly-constant-velocity motion model with white acceleration noise.
// F shifts position by velocity*dt; process noise enters through G with
// per-axis acceleration variance sigma_q2, so G Q G^T has rank 2.
struct CvModel {
  double dt = 1.0;
  double sigma_q2 = 0.01;

  Mat4 F() const;
  Mat42 G() const;
  Mat4 GQGt() const;
};

// Ground-truth trajectory given as one waypoint per step starting at
// entry_step. Truth is deterministic; process noise only enters the filter
// and bound models.
struct TargetTrack {
  int id = 0;
  int entry_step = 0;
  std::vector<Vec2> waypoints;

  bool alive(int step) const;
  int last_step() const { return entry_step + static_cast<int>(waypoints.size()) - 1; }
  // Position from the waypoint table, velocity by forward difference
  // (the final step reuses the previous difference).
  Vec4 state(int step) const;
};

struct Scenario {
  std::vector<TargetTrack> targets;

  int last_step() const;
  std::vector<int> alive_ids(int step) const;
  std::vector<Vec4> true_states(int step) const;
  std::vector<Vec2> true_positions(int step) const;
};

Scenario load_scenario(const std::string& path);
void save_scenario(const Scenario& scenario, const std::string& path);

// Built-in three-target scenario over steps 0..30: north entry at step 0,
// south entry at step 9 and west entry at step 14. The south and west tracks
// cross within 0.5 m at step 22 and accelerate apart afterwards. Identical to
// data/scenarios/three_targets.json.
Scenario make_three_target_scenario();

}  // namespace phdnet
