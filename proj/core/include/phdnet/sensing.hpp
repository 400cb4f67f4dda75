#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "phdnet/common.hpp"
#include "phdnet/network.hpp"

namespace phdnet {

// Position measurements with additive white noise (variance sigma_r2 per
// axis), constant detection probability inside the sensing disk, Poisson
// clutter uniform on the disk.
struct SensingModel {
  double sigma_r2 = 0.1;
  double p_d = 0.95;
  double lambda_fa = 0.1;  // expected clutter points per node per step

  double clutter_density(double r_sen) const { return 1.0 / (kPi * r_sen * r_sen); }
  // kappa = lambda_fa * c_fa, the clutter intensity entering the update.
  double kappa(double r_sen) const { return lambda_fa * clutter_density(r_sen); }
};

// Gaussian position likelihood f(z|x) = N(z; Hx, sigma_r2 I). Returns exactly
// zero once the squared Mahalanobis distance exceeds 110 (value below
// 1.3e-24 of the peak, far under the clutter floor).
double position_likelihood(const Vec2& z, const Vec4& x, double sigma_r2);

// One node's measurement set for one step: detections of in-FOV targets in
// scenario order, then clutter. Consumes the engine.
MeasurementSet sense_node(const SensorNetwork& net, int k, const std::vector<Vec4>& truths,
                          const SensingModel& model, std::mt19937_64& eng);

// All nodes for one step, each from its own substream of run_seed.
std::vector<MeasurementSet> sense_network(const SensorNetwork& net,
                                          const std::vector<Vec4>& truths,
                                          const SensingModel& model, std::uint64_t run_seed,
                                          int step);

}  // namespace phdnet
