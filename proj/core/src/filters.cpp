#include "phdnet/filters.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "phdnet/clustering.hpp"

namespace phdnet {

namespace {

// The intensity is only defined over the surveillance region: clouds that
// drift past the ROI leave every sensing footprint and nothing can ever
// discount them again, so survival ends there. Small slack for edge entries.
void roi_survival_gate(ParticleSet& ps, const Roi& roi) {
  constexpr double kSlack = 2.0;
  for (int i = 0; i < ps.size(); ++i) {
    const double x = ps.x(0, i);
    const double y = ps.x(1, i);
    if (x < roi.xmin - kSlack || x > roi.xmax + kSlack || y < roi.ymin - kSlack ||
        y > roi.ymax + kSlack)
      ps.w(i) = 0.0;
  }
}

}  // namespace

std::vector<Vec4> fuse_estimates(const std::vector<NodeStepRecord>& nodes, double cut,
                                 int* count) {
  int total = 0;
  for (const auto& r : nodes) total += static_cast<int>(r.estimates.size());
  if (total == 0) {
    if (count) *count = 0;
    return {};
  }
  Eigen::Matrix4Xd xs(4, total);
  std::vector<Vec2> pts(total);
  int i = 0;
  for (const auto& r : nodes)
    for (const auto& e : r.estimates) {
      xs.col(i) = e;
      pts[i] = e.head<2>();
      ++i;
    }
  const LinkageResult part = single_linkage(pts, cut);
  if (count) *count = part.n_clusters;
  // plain means: every node's estimate counts once regardless of its mass
  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(total);
  return cluster_centroids(xs, ones, part, /*weighted=*/false);
}

MsPphdFilter::MsPphdFilter(const SensorNetwork& net, FilterParams params, std::uint64_t run_seed)
    : net_(&net), p_(std::move(params)), seed_(run_seed) {
  persistent_.clear();
  newborn_.clear();
}

StepResult MsPphdFilter::step(const std::vector<MeasurementSet>& measurements) {
  const int n = net_->size();
  const int s = step_;
  StepResult out;
  out.step = s;
  out.nodes.resize(n);

  MeasurementSet all;
  for (int k = 0; k < n; ++k) {
    auto& rec = out.nodes[k];
    rec.node = k;
    rec.n_meas = static_cast<int>(measurements[k].size());
    rec.active = rec.n_meas > 0;
    rec.tx_round1 = 2LL * rec.n_meas;
    out.comm_round1 += rec.tx_round1;
    all.insert(all.end(), measurements[k].begin(), measurements[k].end());
  }
  const int m = static_cast<int>(all.size());

  ParticleSet cur = std::move(persistent_);
  cur.append(newborn_);
  persistent_.clear();
  newborn_.clear();
  phd_predict(cur, p_.phd.motion.F(), p_.phd.p_s);
  roi_survival_gate(cur, net_->roi());

  // detections of one target by several sensors land within the noise gate;
  // dividing each update term by its cluster size counts them once
  Eigen::VectorXd divisors;
  if (m > 0) {
    const LinkageResult pre = single_linkage(all, 6.0 * std::sqrt(p_.phd.sigma_r2));
    Eigen::VectorXd csize = Eigen::VectorXd::Zero(pre.n_clusters);
    for (int j = 0; j < m; ++j) csize(pre.labels[j]) += 1.0;
    divisors.resize(m);
    for (int j = 0; j < m; ++j) divisors(j) = csize(pre.labels[j]);
  }

  double kappa = 0.0;
  for (int k = 0; k < n; ++k) {
    const auto& nd = net_->node(k);
    kappa += 1.0 / (kPi * nd.r_sen * nd.r_sen);
  }
  kappa = p_.lambda_fa * kappa / n;

  std::vector<bool> claimed(m, false);
  if (!cur.empty() && m > 0) {
    const Eigen::MatrixXd lik = likelihood_matrix(cur, all, p_.phd.sigma_r2);
    const Eigen::VectorXd lm = measurement_mass(lik, cur.w, p_.phd.p_d);
    Eigen::MatrixXd u(cur.size(), m);
    for (int j = 0; j < m; ++j)
      u.col(j) = lik.col(j) * (p_.phd.p_d / (divisors(j) * (kappa + lm(j))));
    cur.w = cur.w.cwiseProduct(bracket_factor(lik, lm, p_.phd.p_d, kappa, divisors));
    claimed = claimed_measurements(u);
  } else if (!cur.empty()) {
    // the whole network reported nothing: every cloud took a missed detection
    cur.w *= 1.0 - p_.phd.p_d;
  }
  MeasurementSet candidates;
  for (int j = 0; j < m; ++j)
    if (!claimed[j]) candidates.push_back(all[j]);

  const double mass = cur.mass();
  const int n_hat = round_mass(mass);
  auto res_eng = rng::engine(seed_, rng::Phase::kMsResample, s, 0);
  ParticleSet kept = resample(cur, n_hat, p_.phd.n_p, res_eng);

  if (!kept.empty()) {
    const KmeansResult km = kmeans(kept.x, kept.w, n_hat);
    out.estimates = km.centroids;
  }
  out.count = n_hat;

  auto rough_eng = rng::engine(seed_, rng::Phase::kMsRoughen, s, 0);
  roughen(kept, p_.phd.k_rough, p_.phd.e_c, rough_eng);
  persistent_ = std::move(kept);
  auto birth_eng = rng::engine(seed_, rng::Phase::kMsBirth, s, 0);
  newborn_ = spawn_births(candidates, p_.phd, birth_eng);

  ++step_;
  return out;
}

DiffusionPphdFilter::DiffusionPphdFilter(const SensorNetwork& net, FilterParams params,
                                         std::uint64_t run_seed, bool isolated,
                                         FilterPhases phases)
    : net_(&net), p_(std::move(params)), seed_(run_seed), phases_(phases), isolated_(isolated) {
  st_.resize(net.size());
  for (auto& ns : st_) {
    ns.persistent.clear();
    ns.newborn.clear();
  }
}

StepResult DiffusionPphdFilter::step(const std::vector<MeasurementSet>& zs) {
  const int n = net_->size();
  const int s = step_;
  const Mat4 F = p_.phd.motion.F();
  StepResult out;
  out.step = s;
  out.nodes.resize(n);

  const auto hood = [&](int k) -> std::vector<int> {
    if (isolated_) return {k};
    return net_->neighbors(k);
  };

  std::vector<ParticleSet> broadcast(n);  // own post-resampling sets, round-2 payloads
  std::vector<ParticleSet> leftover(n);   // sub-broadcast posteriors kept as local memory
  std::vector<MeasurementSet> candidates(n);
  std::vector<int> n_hat(n, 0);
  std::vector<char> active(n, 0);

  // round 1: measurement exchange and local update. One update bracket per
  // neighbor, gated by that neighbor's field of view: particles a sensor
  // cannot see keep factor 1, covered ones take the missed-detection
  // discount even when the sensor reported nothing. Measurement masses are
  // recomputed from the running weights at each bracket; that keeps the PHD
  // mass calibrated when several neighbors detect the same target.
  for (int k = 0; k < n; ++k) {
    auto& rec = out.nodes[k];
    rec.node = k;
    rec.n_meas = static_cast<int>(zs[k].size());
    const std::vector<int> nb = hood(k);
    const long long links = static_cast<long long>(nb.size()) - 1;
    rec.tx_round1 = 2LL * rec.n_meas * links;

    int m_total = 0;
    for (int l : nb) m_total += static_cast<int>(zs[l].size());

    ParticleSet cur = std::move(st_[k].persistent);
    cur.append(st_[k].newborn);
    st_[k].persistent.clear();
    st_[k].newborn.clear();

    active[k] = (!cur.empty() || m_total > 0) ? 1 : 0;
    rec.active = active[k] != 0;
    if (!active[k]) continue;

    phd_predict(cur, F, p_.phd.p_s);
    roi_survival_gate(cur, net_->roi());

    double anchor = 0.0;  // posterior mass minted by this scan's detections
    if (!cur.empty()) {
      Eigen::MatrixXd u(cur.size(), m_total);
      int col = 0;
      int own_col = 0;
      for (int l : nb) {
        const auto& zl = zs[l];
        if (l == k) own_col = col;
        const auto& nd = net_->node(l);
        const double r2 = nd.r_sen * nd.r_sen;
        Eigen::VectorXd pd(cur.size());
        for (int i = 0; i < cur.size(); ++i) {
          const double dx = cur.x(0, i) - nd.pos.x();
          const double dy = cur.x(1, i) - nd.pos.y();
          pd(i) = (dx * dx + dy * dy <= r2) ? p_.phd.p_d : 0.0;
        }
        if (zl.empty()) {
          cur.w = cur.w.cwiseProduct((1.0 - pd.array()).matrix());
          continue;
        }
        const Eigen::MatrixXd lik = likelihood_matrix(cur, zl, p_.phd.sigma_r2);
        const Eigen::VectorXd lm = measurement_mass(lik, cur.w, pd);
        const double kappa = p_.lambda_fa / (kPi * r2);
        for (int j = 0; j < static_cast<int>(zl.size()); ++j)
          u.col(col + j) = pd.cwiseProduct(lik.col(j)) / (kappa + lm(j));
        cur.w = cur.w.cwiseProduct(bracket_factor(lik, lm, pd, kappa));
        anchor += (lm.array() / (kappa + lm.array())).sum();
        col += static_cast<int>(zl.size());
      }
      if (m_total > 0) {
        // claims span the whole neighborhood set; only own unclaimed
        // measurements seed births at this node
        const std::vector<bool> cls = claimed_measurements(u);
        for (int j = 0; j < static_cast<int>(zs[k].size()); ++j)
          if (!cls[own_col + j]) candidates[k].push_back(zs[k][j]);
      }
    } else {
      candidates[k] = zs[k];  // no particles, nothing can claim
    }

    rec.mass = cur.mass();
    // one detection can never mint a whole unit (the clutter term keeps
    // L/(kappa+L) under 1), so a detection-anchored posterior earns nearest
    // rounding; a coasting one must hold a full surviving target, otherwise
    // neighborhoods of relays would recirculate sub-unit echoes forever
    n_hat[k] = anchor >= 0.2 ? round_mass(rec.mass) : floor_mass(rec.mass);
    rec.n_hat = n_hat[k];
    auto res_eng = rng::engine(seed_, phases_.resample, s, k);
    broadcast[k] = resample(cur, n_hat[k], p_.phd.n_p, res_eng);
    rec.tx_round2 = 5LL * broadcast[k].size() * links;
    // a posterior below one whole target is not worth a broadcast, but
    // deleting it would let a single network-wide missed detection erase an
    // established track; the owner keeps it until a fresh detection re-mints
    // it or the missed-detection discounts wear it down
    if (n_hat[k] == 0 && rec.mass > 0.01) leftover[k] = std::move(cur);
  }

  // round 2: particle exchange. The collective neighborhood set is both the
  // extraction input and next step's persistent population, so information
  // diffuses one hop per step. Uniform convex combination weights keep the
  // collective mass an average of the neighborhood's count estimates; a raw
  // union would multiply mass by the neighborhood size every step.
  std::vector<ParticleSet> collective(n);
  for (int k = 0; k < n; ++k) {
    const std::vector<int> nb = hood(k);
    const double hood_size = static_cast<double>(nb.size());
    std::vector<const ParticleSet*> parts;
    parts.reserve(nb.size());
    for (int l : nb) parts.push_back(&broadcast[l]);
    collective[k] = ParticleSet::concatenate(parts);
    if (!collective[k].empty()) collective[k].w /= hood_size;
    if (!active[k] || collective[k].empty()) continue;

    std::vector<Vec2> pts(collective[k].size());
    for (int i = 0; i < collective[k].size(); ++i) pts[i] = collective[k].x.col(i).head<2>();
    const LinkageResult part = single_linkage(pts, p_.tau_extract);

    // Thin debris trails chain separate targets into one linkage cluster and
    // the joint centroid then lands in the empty space between them. A locked
    // cloud is compact, so anything wider gets split by weighted 2-means
    // until every piece is.
    constexpr double kLockRadius = 1.5;
    std::vector<std::vector<int>> work(part.n_clusters);
    for (int i = 0; i < collective[k].size(); ++i) work[part.labels[i]].push_back(i);
    std::vector<std::vector<int>> atoms;
    while (!work.empty()) {
      std::vector<int> g = std::move(work.back());
      work.pop_back();
      double wsum = 0.0;
      Vec2 c = Vec2::Zero();
      for (int i : g) {
        wsum += collective[k].w(i);
        c += collective[k].w(i) * pts[i];
      }
      if (static_cast<int>(g.size()) < 2 || wsum <= 0.0) {
        atoms.push_back(std::move(g));
        continue;
      }
      c /= wsum;
      double r2 = 0.0;
      for (int i : g) r2 += collective[k].w(i) * (pts[i] - c).squaredNorm();
      if (std::sqrt(r2 / wsum) <= kLockRadius) {
        atoms.push_back(std::move(g));
        continue;
      }
      Eigen::Matrix4Xd xs(4, g.size());
      Eigen::VectorXd ws(g.size());
      for (std::size_t j = 0; j < g.size(); ++j) {
        xs.col(static_cast<int>(j)) = collective[k].x.col(g[j]);
        ws(static_cast<int>(j)) = collective[k].w(g[j]);
      }
      const KmeansResult km = kmeans(xs, ws, 2);
      std::vector<int> a, b;
      for (std::size_t j = 0; j < g.size(); ++j) (km.labels[j] == 0 ? a : b).push_back(g[j]);
      if (a.empty() || b.empty()) {
        atoms.push_back(std::move(g));
        continue;
      }
      work.push_back(std::move(a));
      work.push_back(std::move(b));
    }

    // The convex combination diluted every cloud by the neighborhood size, so
    // judge each piece by its mass per contributing broadcast instead: a
    // target reported by a single neighbor is still worth one full target,
    // while low-grade debris riding along inside otherwise healthy broadcasts
    // stays below half a target no matter how many neighbors echo it.
    std::vector<int> src(collective[k].size());
    {
      int at = 0;
      for (int si = 0; si < static_cast<int>(nb.size()); ++si)
        for (int i = 0; i < broadcast[nb[si]].size(); ++i) src[at++] = si;
    }
    const double contrib_floor = 0.25 / hood_size;  // a quarter target, undiluted
    const int na = static_cast<int>(atoms.size());
    std::vector<double> mhat(na, 0.0);
    double mhat_total = 0.0;
    for (int a = 0; a < na; ++a) {
      std::vector<double> by_src(nb.size(), 0.0);
      for (int i : atoms[a]) by_src[src[i]] += collective[k].w(i);
      int contrib = 0;
      double raw = 0.0;
      for (double v : by_src) {
        raw += v;
        if (v >= contrib_floor) ++contrib;
      }
      if (contrib > 0) mhat[a] = raw * hood_size / contrib;
      mhat_total += mhat[a];
    }
    const int budget = round_mass(mhat_total);
    std::vector<int> order(na);
    for (int a = 0; a < na; ++a) order[a] = a;
    std::sort(order.begin(), order.end(), [&](int a, int b) {
      return mhat[a] != mhat[b] ? mhat[a] > mhat[b] : a < b;
    });
    int emitted = 0;
    for (int r = 0; r < na && emitted < budget; ++r) {
      const int a = order[r];
      if (mhat[a] < 0.5) break;  // less than half a target per endorser
      Vec4 cen = Vec4::Zero();
      double cw = 0.0;
      for (int i : atoms[a]) {
        const double wi = p_.weighted_centroids ? collective[k].w(i) : 1.0;
        cen += wi * collective[k].x.col(i);
        cw += wi;
      }
      out.nodes[k].estimates.push_back(cen / cw);
      ++emitted;
    }
  }

  for (int k = 0; k < n; ++k) {
    auto& rec = out.nodes[k];
    rec.adopted = broadcast[k].empty() && !collective[k].empty();
    // local memory re-enters only when the neighborhood went silent; when
    // broadcasts still flow they already carry this node's information and
    // stacking the kept copy on top would double it every step
    if (collective[k].empty()) collective[k] = std::move(leftover[k]);
    if (active[k]) {
      auto rough_eng = rng::engine(seed_, phases_.roughen, s, k);
      roughen(collective[k], p_.phd.k_rough, p_.phd.e_c, rough_eng);
      auto birth_eng = rng::engine(seed_, phases_.birth, s, k);
      st_[k].newborn = spawn_births(candidates[k], p_.phd, birth_eng);
    }
    st_[k].persistent = std::move(collective[k]);
  }

  for (const auto& rec : out.nodes) {
    out.comm_round1 += rec.tx_round1;
    out.comm_round2 += rec.tx_round2;
  }
  out.estimates = fuse_estimates(out.nodes, p_.fusion_cut, &out.count);
  ++step_;
  return out;
}

}  // namespace phdnet
