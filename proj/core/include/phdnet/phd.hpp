#pragma once

#include <random>
#include <vector>

#include "phdnet/common.hpp"
#include "phdnet/dynamics.hpp"

namespace phdnet {

// Particle representation of a PHD: total weight equals the expected number
// of targets, not 1.
struct ParticleSet {
  Eigen::Matrix4Xd x;   // columns are states
  Eigen::VectorXd w;

  int size() const { return static_cast<int>(x.cols()); }
  bool empty() const { return x.cols() == 0; }
  double mass() const { return w.size() ? w.sum() : 0.0; }

  void clear();
  void append(const ParticleSet& other);
  static ParticleSet concatenate(const std::vector<const ParticleSet*>& parts);
};

struct PhdParams {
  CvModel motion;
  double sigma_r2 = 0.1;
  double p_d = 0.95;
  double p_s = 0.98;
  double p_b = 0.8;        // newborn mass per step (total over candidates)
  double sigma_v = 1.0;    // newborn velocity std
  double e_c = 6.0;        // roughening extent scale
  double k_rough = 0.2;    // roughening gain
  int n_p = 500;           // particles per unit of expected mass
  bool per_candidate_birth = false;  // give each candidate mass p_b instead of p_b total
};

// Deterministic survival prediction: states shift by F, weights scale by
// p_s. Diffusion is injected later by roughening, not here.
void phd_predict(ParticleSet& s, const Mat4& F, double p_s);

// lik(i,j) = f(z_j | x_i), Gaussian position likelihood.
Eigen::MatrixXd likelihood_matrix(const ParticleSet& s, const MeasurementSet& zs,
                                  double sigma_r2);

// L(z_j) = p_d * sum_i lik(i,j) w_i, always from pre-update weights.
Eigen::VectorXd measurement_mass(const Eigen::MatrixXd& lik, const Eigen::VectorXd& w,
                                 double p_d);

// Same with a per-particle detection probability (sensor field-of-view
// profile): L(z_j) = sum_i p_d_i lik(i,j) w_i.
Eigen::VectorXd measurement_mass(const Eigen::MatrixXd& lik, const Eigen::VectorXd& w,
                                 const Eigen::VectorXd& p_d);

// Per-particle multiplier 1 - p_d + sum_j p_d lik(i,j) / (divisor_j * (kappa + L_j)).
// divisors (optional) discount duplicate detections of one target by several
// sensors; empty means all ones.
Eigen::VectorXd bracket_factor(const Eigen::MatrixXd& lik, const Eigen::VectorXd& meas_mass,
                               double p_d, double kappa,
                               const Eigen::VectorXd& divisors = Eigen::VectorXd());

// Per-particle detection-probability variant: particles a sensor cannot see
// keep factor 1, covered ones get the missed-detection discount.
Eigen::VectorXd bracket_factor(const Eigen::MatrixXd& lik, const Eigen::VectorXd& meas_mass,
                               const Eigen::VectorXd& p_d, double kappa);

// A measurement is claimed when it is some particle's best column with a
// strictly positive likelihood (zero rows do not vote). Ties take the first
// best column. Unclaimed measurements become birth candidates.
std::vector<bool> claimed_measurements(const Eigen::MatrixXd& lik);

// Round half away from zero; the target-count estimate from PHD mass.
int round_mass(double mass);

// Floor with a small epsilon against float noise. The diffusion filter
// rebroadcasts only whole expected targets: rounding half up would let
// sub-unit neighborhood echoes regenerate to full mass in the resampling
// reset and recirculate forever.
int floor_mass(double mass);

// Systematic resampling to n_hat * n_p particles of weight 1/n_p each, so
// the output mass is exactly n_hat. n_hat <= 0 empties the set.
ParticleSet resample(const ParticleSet& s, int n_hat, int n_p, std::mt19937_64& eng);

// Crassidis-style jitter with per-component std k * e_c * N^(-1/4) on all
// four state components.
void roughen(ParticleSet& s, double k, double e_c, std::mt19937_64& eng);

// Newborn population: n_p particles per candidate, position N(z, sigma_r2 I),
// velocity N(0, sigma_v^2 I). Total mass p_b (or p_b per candidate when
// per_candidate_birth).
ParticleSet spawn_births(const MeasurementSet& candidates, const PhdParams& p,
                         std::mt19937_64& eng);

}  // namespace phdnet
