#pragma once

#include <vector>

#include "phdnet/common.hpp"
#include "phdnet/dynamics.hpp"
#include "phdnet/network.hpp"

namespace phdnet {

// Information-matrix prediction J -> (F J^{-1} F^T + G Q G^T)^{-1}, defined
// for singular J as well: directions in F*null(J) stay uninformative, the
// complement B gets J' = B (B^T (F J^+ F^T + GQG^T) B)^{-1} B^T. With J = 0
// the result is 0; with Q = 0 and F = I the information is unchanged.
Mat4 pcrlb_predict(const Mat4& J, const Mat4& F, const Mat4& GQGt);

// Additive position information from q independent detectors with detection
// probability p_d and per-axis noise variance sigma_r2.
Mat4 position_information(int q, double p_d, double sigma_r2);

// Trace of the position 2x2 block of J^{-1} (inverse first, then block).
// +inf when J is singular.
double position_bound(const Mat4& J);

struct DpcrlbParams {
  // Truth trajectories are deterministic waypoint tables, so the bound is
  // computed with zero process noise by default; set motion.sigma_q2 to the
  // filter value to bound a diffusing-target model instead.
  CvModel motion{1.0, 0.0};
  double sigma_r2 = 0.1;
  double p_d = 0.95;
  double sigma_v = 1.0;  // birth velocity prior std
};

struct NodeBoundRow {
  int step = 0;
  int node_id = 0;
  int n_targets = 0;
  double bound_sum = 0.0;   // sum of per-target position bounds
  double bound_mean = 0.0;  // mean over in-scope targets, 0 when none
  int m_size = 0;           // nodes with at least one in-scope target this step
  double dpcrlb = 0.0;      // network bound: mean bound_sum over those nodes, NaN when none
};

// Decentralized posterior bound, evaluated per node on deterministic truth.
// A target is in scope at node k while alive and within r_sen of some
// neighbor l in N_k. Each step an in-scope node seeds the target's
// information from the most informative predicted block available in its
// two-hop neighborhood (its own from last step, or a neighbor-of-neighbor's),
// falling back to the birth prior diag(1/sr2, 1/sr2, 1/sv2, 1/sv2) only when
// nobody held the target; it then adds the measurement update with q = number
// of two-hop nodes holding the target in sensing range. Out-of-scope targets
// are dropped (their information survives at the nodes still tracking them
// and is re-inherited on scope re-entry).
class DpcrlbEngine {
 public:
  DpcrlbEngine(const SensorNetwork& net, const Scenario& scenario, DpcrlbParams params);

  // Process the next step (first call handles step 0). Returns false once
  // past the scenario's last step.
  bool advance();
  int current_step() const { return step_ - 1; }

  struct TargetBound {
    int target_id = 0;
    double bound = 0.0;
  };
  struct StepDetail {
    int node = 0;  // 0-based index
    std::vector<TargetBound> targets;
  };
  // Per-node detail of the step processed by the latest advance().
  const std::vector<StepDetail>& step_detail() const { return detail_; }
  const std::vector<NodeBoundRow>& rows() const { return rows_; }

 private:
  const SensorNetwork* net_;
  const Scenario* scenario_;
  DpcrlbParams params_;
  int step_ = 0;
  // info_[k] holds last step's J per in-scope target at node k, keyed by id.
  std::vector<std::vector<std::pair<int, Mat4>>> info_;
  std::vector<StepDetail> detail_;
  std::vector<NodeBoundRow> rows_;
};

std::vector<NodeBoundRow> compute_dpcrlb(const SensorNetwork& net, const Scenario& scenario,
                                         const DpcrlbParams& params);

}  // namespace phdnet
