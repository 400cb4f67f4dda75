#include "phdnet/sensing.hpp"

#include <cmath>

#include "phdnet/rng.hpp"

namespace phdnet {

double position_likelihood(const Vec2& z, const Vec4& x, double sigma_r2) {
  const double q = (z - x.head<2>()).squaredNorm() / sigma_r2;
  if (q > 110.0) return 0.0;
  return std::exp(-0.5 * q) / (2.0 * kPi * sigma_r2);
}

MeasurementSet sense_node(const SensorNetwork& net, int k, const std::vector<Vec4>& truths,
                          const SensingModel& model, std::mt19937_64& eng) {
  MeasurementSet zs;
  const Node& nd = net.node(k);
  const double sigma_r = std::sqrt(model.sigma_r2);
  std::bernoulli_distribution detect(model.p_d);
  std::normal_distribution<double> noise(0.0, sigma_r);
  for (const auto& x : truths) {
    if (!net.in_fov(k, x.head<2>())) continue;
    if (!detect(eng)) continue;
    const double nx = noise(eng);
    const double ny = noise(eng);
    zs.push_back(x.head<2>() + Vec2{nx, ny});
  }
  std::poisson_distribution<int> n_clutter(model.lambda_fa);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const int nc = n_clutter(eng);
  for (int i = 0; i < nc; ++i) {
    const double r = nd.r_sen * std::sqrt(unit(eng));
    const double theta = 2.0 * kPi * unit(eng);
    zs.push_back(nd.pos + Vec2{r * std::cos(theta), r * std::sin(theta)});
  }
  return zs;
}

std::vector<MeasurementSet> sense_network(const SensorNetwork& net,
                                          const std::vector<Vec4>& truths,
                                          const SensingModel& model, std::uint64_t run_seed,
                                          int step) {
  std::vector<MeasurementSet> out(net.size());
  for (int k = 0; k < net.size(); ++k) {
    auto eng = rng::engine(run_seed, rng::Phase::kSense, step, k);
    out[k] = sense_node(net, k, truths, model, eng);
  }
  return out;
}

}  // namespace phdnet
