#pragma once

#include <cstdint>
#include <vector>

#include "phdnet/common.hpp"
#include "phdnet/network.hpp"
#include "phdnet/phd.hpp"
#include "phdnet/rng.hpp"
#include "phdnet/sensing.hpp"

namespace phdnet {

struct FilterParams {
  PhdParams phd;
  double lambda_fa = 0.1;
  double tau_extract = 4.0;        // collective extraction linkage cut
  double fusion_cut = 2.5;         // network-level estimate fusion cut
  bool weighted_centroids = true;
};

struct NodeStepRecord {
  int node = 0;
  bool active = false;
  bool adopted = false;            // took over neighbor particles at step end
  int n_meas = 0;                  // own measurements this step
  double mass = 0.0;               // post-update PHD mass
  int n_hat = 0;
  std::vector<Vec4> estimates;     // node-level extraction, empty when inactive
  long long tx_round1 = 0;
  long long tx_round2 = 0;
};

struct StepResult {
  int step = -1;
  std::vector<Vec4> estimates;     // network-level (center or fused) estimates
  int count = 0;
  long long comm_round1 = 0;       // scalars sent: measurement exchange
  long long comm_round2 = 0;       // scalars sent: particle exchange
  std::vector<NodeStepRecord> nodes;
};

struct FilterPhases {
  rng::Phase resample, roughen, birth;
};

// Centralized baseline: one PHD over the union of all node measurements.
// Duplicate detections are discounted by pre-clustering the measurements
// (single linkage, gate 6 sigma_r) and dividing each update term by its
// cluster size. Extraction is k-means with k = round(mass). Communication:
// two scalars per measurement shipped to the center, nothing back.
class MsPphdFilter {
 public:
  MsPphdFilter(const SensorNetwork& net, FilterParams params, std::uint64_t run_seed);

  StepResult step(const std::vector<MeasurementSet>& measurements);
  int steps_done() const { return step_; }
  const ParticleSet& particles() const { return persistent_; }

 private:
  const SensorNetwork* net_;
  FilterParams p_;
  std::uint64_t seed_;
  int step_ = 0;
  ParticleSet persistent_, newborn_;
};

// Diffusion variant: every node runs a local PHD, exchanges measurements
// with its neighbors (round 1), multiplies one update bracket per neighbor
// with a nonempty set, then exchanges post-resampling particles (round 2)
// and extracts estimates from the collective neighborhood set via single
// linkage. Nodes whose populations died out adopt received particles, which
// diffuses track information one hop per step. The `isolated` flag collapses
// every neighborhood to the node itself (the no-cooperation baseline).
class DiffusionPphdFilter {
 public:
  DiffusionPphdFilter(const SensorNetwork& net, FilterParams params, std::uint64_t run_seed,
                      bool isolated = false,
                      FilterPhases phases = {rng::Phase::kDiffResample, rng::Phase::kDiffRoughen,
                                             rng::Phase::kDiffBirth});

  StepResult step(const std::vector<MeasurementSet>& measurements);
  int steps_done() const { return step_; }
  const ParticleSet& node_particles(int k) const { return st_[k].persistent; }

 private:
  struct NodeState {
    ParticleSet persistent, newborn;
  };
  const SensorNetwork* net_;
  FilterParams p_;
  std::uint64_t seed_;
  FilterPhases phases_;
  bool isolated_;
  int step_ = 0;
  std::vector<NodeState> st_;
};

// No-cooperation baseline: independent per-node PHD filters, reported
// through the same fused network-level estimate set.
class LocalPphdFilter {
 public:
  LocalPphdFilter(const SensorNetwork& net, FilterParams params, std::uint64_t run_seed)
      : impl_(net, params, run_seed, /*isolated=*/true,
              {rng::Phase::kLocalResample, rng::Phase::kLocalRoughen, rng::Phase::kLocalBirth}) {}

  StepResult step(const std::vector<MeasurementSet>& measurements) {
    return impl_.step(measurements);
  }
  int steps_done() const { return impl_.steps_done(); }
  const ParticleSet& node_particles(int k) const { return impl_.node_particles(k); }

 private:
  DiffusionPphdFilter impl_;
};

// Fuse per-node estimate lists into one network-level set by single linkage
// at `cut`; returns cluster means and sets `count` to the cluster count.
std::vector<Vec4> fuse_estimates(const std::vector<NodeStepRecord>& nodes, double cut,
                                 int* count);

}  // namespace phdnet
