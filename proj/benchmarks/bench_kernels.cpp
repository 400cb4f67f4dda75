#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "phdnet/clustering.hpp"
#include "phdnet/filters.hpp"
#include "phdnet/metrics.hpp"
#include "phdnet/phd.hpp"
#include "phdnet/sensing.hpp"

using namespace phdnet;

namespace {

ParticleSet random_cloud(int n, std::uint64_t seed) {
  std::mt19937_64 eng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  ParticleSet s;
  s.x.resize(4, n);
  for (int i = 0; i < n; ++i)
    for (int d = 0; d < 4; ++d) s.x(d, i) = g(eng);
  s.w = Eigen::VectorXd::Constant(n, 1.0 / n);
  return s;
}

std::vector<Vec2> random_points(int n, std::uint64_t seed, double extent) {
  std::mt19937_64 eng(seed);
  std::uniform_real_distribution<double> u(-extent, extent);
  std::vector<Vec2> pts(n);
  for (auto& p : pts) p = Vec2{u(eng), u(eng)};
  return pts;
}

}  // namespace

// particle weighting: likelihoods, measurement masses and the update bracket
static void BM_Weighting(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const ParticleSet cloud = random_cloud(n, 42);
  MeasurementSet zs;
  std::mt19937_64 eng(7);
  std::normal_distribution<double> g(0.0, 1.0);
  for (int j = 0; j < 5; ++j) zs.push_back(Vec2{g(eng), g(eng)});
  for (auto _ : state) {
    const Eigen::MatrixXd lik = likelihood_matrix(cloud, zs, 0.1);
    const Eigen::VectorXd lm = measurement_mass(lik, cloud.w, 0.95);
    benchmark::DoNotOptimize(bracket_factor(lik, lm, 0.95, 1e-3).sum());
  }
  state.SetComplexityN(n);
}
BENCHMARK(BM_Weighting)->RangeMultiplier(2)->Range(500, 8000)->Complexity(benchmark::oN);

static void BM_SingleLinkage(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const std::vector<Vec2> pts = random_points(n, 99, 10.0);
  for (auto _ : state) benchmark::DoNotOptimize(single_linkage(pts, 1.0).n_clusters);
  state.SetComplexityN(n);
}
BENCHMARK(BM_SingleLinkage)->RangeMultiplier(2)->Range(50, 1600)->Complexity(benchmark::oNSquared);

static void BM_Resample(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const ParticleSet cloud = random_cloud(n, 17);
  std::mt19937_64 eng(5);
  for (auto _ : state) benchmark::DoNotOptimize(resample(cloud, 1, n, eng).mass());
}
BENCHMARK(BM_Resample)->Range(500, 8000);

static void BM_Ospa(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const std::vector<Vec2> a = random_points(n, 3, 10.0);
  const std::vector<Vec2> b = random_points(n, 4, 10.0);
  for (auto _ : state) benchmark::DoNotOptimize(ospa(a, b, 2.0, 2.0));
}
BENCHMARK(BM_Ospa)->Range(4, 64);

// one synchronous diffusion step over the small fully-connected grid
static void BM_DiffusionStep(benchmark::State& state) {
  const SensorNetwork net = make_grid9_layout();
  FilterParams p;
  p.phd.n_p = static_cast<int>(state.range(0));
  std::vector<Vec4> truths{Vec4{2.0, -3.0, 0.0, 0.0}, Vec4{-9.0, 6.0, 0.0, 0.0}};
  SensingModel sm;
  for (auto _ : state) {
    state.PauseTiming();
    DiffusionPphdFilter filter(net, p, 2024);
    // warm up: populate persistent sets so the timed step does real work
    for (int s = 0; s < 3; ++s)
      filter.step(sense_network(net, truths, sm, 2024, s));
    state.ResumeTiming();
    benchmark::DoNotOptimize(filter.step(sense_network(net, truths, sm, 2024, 3)).count);
  }
}
BENCHMARK(BM_DiffusionStep)->Arg(100)->Arg(500);

BENCHMARK_MAIN();
