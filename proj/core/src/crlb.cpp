#include "phdnet/crlb.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>
#include <vector>

#include <Eigen/QR>

namespace phdnet {

Mat4 pcrlb_predict(const Mat4& J, const Mat4& F, const Mat4& GQGt) {
  Eigen::SelfAdjointEigenSolver<Mat4> es(J);
  const Vec4 evals = es.eigenvalues();
  const double tol = 1e-12 * evals.cwiseAbs().maxCoeff();
  int rank = 0;
  for (int i = 0; i < 4; ++i)
    if (evals(i) > tol) ++rank;

  if (rank == 4) return (F * J.inverse() * F.transpose() + GQGt).inverse();
  if (rank == 0) return Mat4::Zero();

  // Directions in F*null(J) carry no information. On the orthogonal
  // complement B the covariance-domain recursion stays finite:
  // J' = B (B^T (F J^+ F^T + GQGt) B)^{-1} B^T, the limit of regularizing
  // the null directions with vanishing prior information.
  Mat4 jplus = Mat4::Zero();
  Eigen::Matrix<double, 4, Eigen::Dynamic> null_basis(4, 4 - rank);
  int c = 0;
  for (int i = 0; i < 4; ++i) {
    const Vec4 v = es.eigenvectors().col(i);
    if (evals(i) > tol)
      jplus += v * v.transpose() / evals(i);
    else
      null_basis.col(c++) = v;
  }
  const Eigen::Matrix<double, 4, Eigen::Dynamic> fn = F * null_basis;
  Eigen::HouseholderQR<Eigen::Matrix<double, 4, Eigen::Dynamic>> qr(fn);
  const Mat4 qfull = qr.householderQ() * Mat4::Identity();
  const Eigen::Matrix<double, 4, Eigen::Dynamic> b = qfull.rightCols(rank);
  const Eigen::MatrixXd mid = b.transpose() * (F * jplus * F.transpose() + GQGt) * b;
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(mid);
  const Mat4 out = b * cod.pseudoInverse() * b.transpose();
  return 0.5 * (out + out.transpose());
}

Mat4 position_information(int q, double p_d, double sigma_r2) {
  Mat4 m = Mat4::Zero();
  m(0, 0) = q * p_d / sigma_r2;
  m(1, 1) = m(0, 0);
  return m;
}

double position_bound(const Mat4& J) {
  Eigen::FullPivLU<Mat4> lu(J);
  if (!lu.isInvertible()) return std::numeric_limits<double>::infinity();
  const Mat4 cov = lu.inverse();
  return cov(0, 0) + cov(1, 1);
}

DpcrlbEngine::DpcrlbEngine(const SensorNetwork& net, const Scenario& scenario,
                           DpcrlbParams params)
    : net_(&net), scenario_(&scenario), params_(params) {
  info_.resize(net.size());
}

bool DpcrlbEngine::advance() {
  if (step_ > scenario_->last_step()) return false;
  const int s = step_;
  const int n = net_->size();
  const Mat4 F = params_.motion.F();
  const Mat4 GQGt = params_.motion.GQGt();

  // Predict every block carried from the previous step and score it once.
  struct PredBlock {
    int target_id;
    Mat4 J;
    double bound;
  };
  std::vector<std::vector<PredBlock>> pred(n);
  for (int k = 0; k < n; ++k) {
    pred[k].reserve(info_[k].size());
    for (const auto& [tid, J] : info_[k]) {
      const Mat4 pj = pcrlb_predict(J, F, GQGt);
      pred[k].push_back({tid, pj, position_bound(pj)});
    }
  }
  auto find_pred = [&](int k, int tid) -> const PredBlock* {
    for (const auto& blk : pred[k])
      if (blk.target_id == tid) return &blk;
    return nullptr;
  };

  const double sv2 = params_.sigma_v * params_.sigma_v;
  const Mat4 birth =
      Vec4{1.0 / params_.sigma_r2, 1.0 / params_.sigma_r2, 1.0 / sv2, 1.0 / sv2}.asDiagonal();

  detail_.assign(n, StepDetail{});
  for (int k = 0; k < n; ++k) detail_[k].node = k;
  std::vector<std::vector<std::pair<int, Mat4>>> next(n);

  for (const auto& t : scenario_->targets) {
    if (!t.alive(s)) continue;
    const Vec2 pos = t.state(s).head<2>();
    std::vector<char> covers(n, 0);
    for (int l = 0; l < n; ++l)
      if (net_->in_fov(l, pos)) covers[l] = 1;

    for (int k = 0; k < n; ++k) {
      bool in_scope = false;
      for (int l : net_->neighbors(k)) {
        if (covers[l]) {
          in_scope = true;
          break;
        }
      }
      if (!in_scope) continue;

      int q = 0;
      const PredBlock* best = nullptr;
      for (int l : net_->two_hop(k)) {
        if (covers[l]) ++q;
        if (const PredBlock* blk = find_pred(l, t.id)) {
          if (best == nullptr || blk->bound < best->bound) best = blk;
        }
      }
      Mat4 J = best != nullptr ? best->J : birth;
      J += position_information(q, params_.p_d, params_.sigma_r2);
      next[k].emplace_back(t.id, J);
      detail_[k].targets.push_back({t.id, position_bound(J)});
    }
  }
  info_ = std::move(next);

  // Dense rows: one per node even with nothing in scope; the step-level
  // network bound averages bound_sum over the nodes holding something.
  std::vector<NodeBoundRow> step_rows(n);
  double sum = 0.0;
  int m = 0;
  for (int k = 0; k < n; ++k) {
    auto& r = step_rows[k];
    r.step = s;
    r.node_id = net_->node(k).id;
    r.n_targets = static_cast<int>(detail_[k].targets.size());
    for (const auto& tb : detail_[k].targets) r.bound_sum += tb.bound;
    r.bound_mean = r.n_targets > 0 ? r.bound_sum / r.n_targets : 0.0;
    if (r.n_targets > 0) {
      ++m;
      sum += r.bound_sum;
    }
  }
  const double dp = m > 0 ? sum / m : std::numeric_limits<double>::quiet_NaN();
  for (auto& r : step_rows) {
    r.m_size = m;
    r.dpcrlb = dp;
    rows_.push_back(r);
  }

  ++step_;
  return true;
}

std::vector<NodeBoundRow> compute_dpcrlb(const SensorNetwork& net, const Scenario& scenario,
                                         const DpcrlbParams& params) {
  DpcrlbEngine engine(net, scenario, params);
  while (engine.advance()) {
  }
  return engine.rows();
}

}  // namespace phdnet
