#include "phdnet/phd.hpp"

#include <cmath>

#include "phdnet/sensing.hpp"

namespace phdnet {

void ParticleSet::clear() {
  x.resize(4, 0);
  w.resize(0);
}

void ParticleSet::append(const ParticleSet& other) {
  if (other.empty()) return;
  const int n = size();
  const int m = other.size();
  x.conservativeResize(4, n + m);
  x.rightCols(m) = other.x;
  w.conservativeResize(n + m);
  w.tail(m) = other.w;
}

ParticleSet ParticleSet::concatenate(const std::vector<const ParticleSet*>& parts) {
  int total = 0;
  for (const auto* p : parts) total += p->size();
  ParticleSet out;
  out.x.resize(4, total);
  out.w.resize(total);
  int at = 0;
  for (const auto* p : parts) {
    const int m = p->size();
    if (m == 0) continue;
    out.x.middleCols(at, m) = p->x;
    out.w.segment(at, m) = p->w;
    at += m;
  }
  return out;
}

void phd_predict(ParticleSet& s, const Mat4& F, double p_s) {
  if (s.empty()) return;
  s.x = (F * s.x).eval();
  s.w *= p_s;
}

Eigen::MatrixXd likelihood_matrix(const ParticleSet& s, const MeasurementSet& zs,
                                  double sigma_r2) {
  Eigen::MatrixXd lik(s.size(), static_cast<int>(zs.size()));
  for (int j = 0; j < static_cast<int>(zs.size()); ++j)
    for (int i = 0; i < s.size(); ++i)
      lik(i, j) = position_likelihood(zs[j], s.x.col(i), sigma_r2);
  return lik;
}

Eigen::VectorXd measurement_mass(const Eigen::MatrixXd& lik, const Eigen::VectorXd& w,
                                 double p_d) {
  return p_d * (lik.transpose() * w);
}

Eigen::VectorXd measurement_mass(const Eigen::MatrixXd& lik, const Eigen::VectorXd& w,
                                 const Eigen::VectorXd& p_d) {
  return lik.transpose() * p_d.cwiseProduct(w);
}

Eigen::VectorXd bracket_factor(const Eigen::MatrixXd& lik, const Eigen::VectorXd& meas_mass,
                               double p_d, double kappa, const Eigen::VectorXd& divisors) {
  Eigen::VectorXd f = Eigen::VectorXd::Constant(lik.rows(), 1.0 - p_d);
  for (int j = 0; j < lik.cols(); ++j) {
    const double div = divisors.size() > 0 ? divisors(j) : 1.0;
    f += lik.col(j) * (p_d / (div * (kappa + meas_mass(j))));
  }
  return f;
}

Eigen::VectorXd bracket_factor(const Eigen::MatrixXd& lik, const Eigen::VectorXd& meas_mass,
                               const Eigen::VectorXd& p_d, double kappa) {
  Eigen::VectorXd f = Eigen::VectorXd::Ones(lik.rows()) - p_d;
  for (int j = 0; j < lik.cols(); ++j)
    f += p_d.cwiseProduct(lik.col(j)) / (kappa + meas_mass(j));
  return f;
}

std::vector<bool> claimed_measurements(const Eigen::MatrixXd& lik) {
  std::vector<bool> claimed(lik.cols(), false);
  for (int i = 0; i < lik.rows(); ++i) {
    int best = -1;
    double bv = 0.0;
    for (int j = 0; j < lik.cols(); ++j) {
      if (lik(i, j) > bv) {
        bv = lik(i, j);
        best = j;
      }
    }
    if (best >= 0) claimed[best] = true;
  }
  return claimed;
}

int round_mass(double mass) { return static_cast<int>(std::llround(mass)); }

int floor_mass(double mass) { return static_cast<int>(std::floor(mass + 1e-6)); }

ParticleSet resample(const ParticleSet& s, int n_hat, int n_p, std::mt19937_64& eng) {
  ParticleSet out;
  out.clear();
  if (n_hat <= 0 || s.empty()) return out;
  const double total = s.mass();
  if (total <= 0.0) return out;
  const int n = n_hat * n_p;
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  const double u0 = u01(eng);
  out.x.resize(4, n);
  out.w = Eigen::VectorXd::Constant(n, 1.0 / n_p);
  int idx = 0;
  double cum = s.w(0);
  for (int k = 0; k < n; ++k) {
    const double pos = (u0 + k) * total / n;
    while (pos > cum && idx + 1 < s.size()) {
      ++idx;
      cum += s.w(idx);
    }
    out.x.col(k) = s.x.col(idx);
  }
  return out;
}

void roughen(ParticleSet& s, double k, double e_c, std::mt19937_64& eng) {
  if (s.empty()) return;
  const double sigma = k * e_c * std::pow(static_cast<double>(s.size()), -0.25);
  std::normal_distribution<double> g(0.0, sigma);
  for (int i = 0; i < s.size(); ++i)
    for (int d = 0; d < 4; ++d) s.x(d, i) += g(eng);
}

ParticleSet spawn_births(const MeasurementSet& candidates, const PhdParams& p,
                         std::mt19937_64& eng) {
  ParticleSet out;
  out.clear();
  const int nc = static_cast<int>(candidates.size());
  if (nc == 0 || p.n_p <= 0) return out;
  const double mass_per = p.per_candidate_birth ? p.p_b : p.p_b / nc;
  const double sigma_r = std::sqrt(p.sigma_r2);
  std::normal_distribution<double> g(0.0, 1.0);
  out.x.resize(4, nc * p.n_p);
  out.w = Eigen::VectorXd::Constant(nc * p.n_p, mass_per / p.n_p);
  int at = 0;
  for (const auto& z : candidates) {
    for (int i = 0; i < p.n_p; ++i, ++at) {
      out.x(0, at) = z.x() + sigma_r * g(eng);
      out.x(1, at) = z.y() + sigma_r * g(eng);
      out.x(2, at) = p.sigma_v * g(eng);
      out.x(3, at) = p.sigma_v * g(eng);
    }
  }
  return out;
}

}  // namespace phdnet
