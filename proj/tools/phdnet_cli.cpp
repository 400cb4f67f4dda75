#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "phdnet/clustering.hpp"
#include "phdnet/config.hpp"
#include "phdnet/harness.hpp"

namespace fs = std::filesystem;
using namespace phdnet;

namespace {

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= s.size(); ++i) {
    if (i == s.size() || s[i] == ',') {
      std::string item = s.substr(start, i - start);
      const auto a = item.find_first_not_of(" \t");
      const auto b = item.find_last_not_of(" \t");
      if (a != std::string::npos) out.push_back(item.substr(a, b - a + 1));
      start = i + 1;
    }
  }
  return out;
}

SensorNetwork make_network(const RunConfig& cfg) {
  return cfg.layout.empty() ? make_grid30_layout() : load_layout(cfg.layout);
}

Scenario make_scenario(const RunConfig& cfg) {
  return cfg.scenario.empty() ? make_three_target_scenario() : load_scenario(cfg.scenario);
}

int cmd_simulate(const RunConfig& cfg) {
  const SensorNetwork net = make_network(cfg);
  const Scenario sc = make_scenario(cfg);

  fs::create_directories(cfg.out_dir);
  const HarnessResult res = run_monte_carlo(cfg, net, sc);

  const fs::path out(cfg.out_dir);
  write_runs_csv((out / "runs.csv").string(), res.rows);
  write_aggregate_csv((out / "aggregate.csv").string(), aggregate(res.rows));
  if (cfg.bounds) write_bounds_csv((out / "bounds.csv").string(), res.bounds);
  if (cfg.trace) write_trace_jsonl((out / "trace.jsonl").string(), res.trace);

  std::printf("simulate: %d run(s), steps 0..%d, filters", cfg.runs, cfg.steps);
  for (const auto& f : cfg.filters) std::printf(" %s", f.c_str());
  std::printf("\nwrote %s/runs.csv (%zu rows), aggregate.csv%s%s\n", cfg.out_dir.c_str(),
              res.rows.size(), cfg.bounds ? ", bounds.csv" : "",
              cfg.trace ? ", trace.jsonl" : "");
  return 0;
}

int cmd_evaluate(const std::string& runs_csv, const std::string& out_dir) {
  if (!fs::exists(runs_csv)) throw ConfigError("no such file: " + runs_csv);
  const std::vector<StepMetricsRow> rows = read_runs_csv(runs_csv);
  const std::vector<AggregateRow> agg = aggregate(rows);

  std::printf("%-8s %5s %8s %11s %11s %14s %13s\n", "filter", "step", "n_valid", "mean_count",
              "mean_ospa", "mean_scaled2", "mean_scalars");
  for (const auto& a : agg)
    std::printf("%-8s %5d %8d %11.4f %11.4f %14.4f %13.1f\n", a.filter.c_str(), a.step,
                a.n_valid, a.mean_count, a.mean_ospa, a.mean_ospa_sq_scaled,
                a.mean_comm_round1 + a.mean_comm_round2);

  // one overall line per filter across valid steps
  std::vector<std::string> names;
  for (const auto& a : agg)
    if (std::find(names.begin(), names.end(), a.filter) == names.end()) names.push_back(a.filter);
  for (const auto& name : names) {
    double ospa_sum = 0.0, scaled_sum = 0.0;
    int n = 0;
    for (const auto& a : agg) {
      if (a.filter != name || a.n_valid == 0) continue;
      ospa_sum += a.mean_ospa;
      scaled_sum += a.mean_ospa_sq_scaled;
      ++n;
    }
    if (n > 0)
      std::printf("overall %-8s mean ospa %.4f, mean scaled2 %.4f over %d steps\n", name.c_str(),
                  ospa_sum / n, scaled_sum / n, n);
  }

  if (!out_dir.empty()) {
    fs::create_directories(out_dir);
    write_aggregate_csv((fs::path(out_dir) / "aggregate.csv").string(), agg);
    std::printf("wrote %s/aggregate.csv\n", out_dir.c_str());
  }
  return 0;
}

struct Series {
  std::string name;
  std::vector<std::pair<double, double>> pts;
};

void write_chart(const std::string& path, const std::string& title, const std::string& xlabel,
                 const std::string& ylabel, const std::vector<Series>& series) {
  static const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                  "#ff7f0e", "#8c564b", "#17becf"};
  const int W = 680, H = 420, ML = 64, MR = 150, MT = 40, MB = 48;

  double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
  double ymin = xmin, ymax = -xmin;
  for (const auto& s : series)
    for (const auto& [x, y] : s.pts) {
      if (!std::isfinite(x) || !std::isfinite(y)) continue;
      xmin = std::min(xmin, x);
      xmax = std::max(xmax, x);
      ymin = std::min(ymin, y);
      ymax = std::max(ymax, y);
    }
  if (!std::isfinite(xmin)) {
    xmin = 0, xmax = 1, ymin = 0, ymax = 1;
  }
  if (xmax == xmin) xmax = xmin + 1;
  if (ymax == ymin) ymax = ymin + 1;
  const double ypad = 0.05 * (ymax - ymin);
  ymin -= ypad;
  ymax += ypad;

  const auto sx = [&](double x) { return ML + (x - xmin) / (xmax - xmin) * (W - ML - MR); };
  const auto sy = [&](double y) { return H - MB - (y - ymin) / (ymax - ymin) * (H - MT - MB); };

  std::ofstream out(path);
  if (!out.is_open()) throw std::runtime_error("cannot write " + path);
  char buf[256];
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
      << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  out << "<rect width=\"" << W << "\" height=\"" << H << "\" fill=\"white\"/>\n";
  out << "<text x=\"" << ML << "\" y=\"22\" font-size=\"15\">" << title << "</text>\n";

  // axes and ticks
  std::snprintf(buf, sizeof(buf),
                "<line x1=\"%d\" y1=\"%d\" x2=\"%d\" y2=\"%d\" stroke=\"black\"/>\n", ML, MT,
                ML, H - MB);
  out << buf;
  std::snprintf(buf, sizeof(buf),
                "<line x1=\"%d\" y1=\"%d\" x2=\"%d\" y2=\"%d\" stroke=\"black\"/>\n", ML, H - MB,
                W - MR, H - MB);
  out << buf;
  for (int t = 0; t <= 4; ++t) {
    const double yv = ymin + (ymax - ymin) * t / 4.0;
    const double xv = xmin + (xmax - xmin) * t / 4.0;
    std::snprintf(buf, sizeof(buf),
                  "<line x1=\"%d\" y1=\"%.1f\" x2=\"%d\" y2=\"%.1f\" stroke=\"#ddd\"/>"
                  "<text x=\"%d\" y=\"%.1f\" text-anchor=\"end\">%.3g</text>\n",
                  ML, sy(yv), W - MR, sy(yv), ML - 6, sy(yv) + 4, yv);
    out << buf;
    std::snprintf(buf, sizeof(buf),
                  "<text x=\"%.1f\" y=\"%d\" text-anchor=\"middle\">%.3g</text>\n", sx(xv),
                  H - MB + 18, xv);
    out << buf;
  }
  std::snprintf(buf, sizeof(buf), "<text x=\"%d\" y=\"%d\" text-anchor=\"middle\">%s</text>\n",
                (ML + W - MR) / 2, H - 10, xlabel.c_str());
  out << buf;
  std::snprintf(buf, sizeof(buf),
                "<text x=\"16\" y=\"%d\" transform=\"rotate(-90 16 %d)\" "
                "text-anchor=\"middle\">%s</text>\n",
                (MT + H - MB) / 2, (MT + H - MB) / 2, ylabel.c_str());
  out << buf;

  for (std::size_t i = 0; i < series.size(); ++i) {
    const char* color = kColors[i % (sizeof(kColors) / sizeof(kColors[0]))];
    std::string points;
    for (const auto& [x, y] : series[i].pts) {
      if (!std::isfinite(x) || !std::isfinite(y)) continue;
      std::snprintf(buf, sizeof(buf), "%.1f,%.1f ", sx(x), sy(y));
      points += buf;
    }
    if (!points.empty()) {
      out << "<polyline fill=\"none\" stroke=\"" << color
          << "\" stroke-width=\"1.5\" points=\"" << points << "\"/>\n";
    }
    const int ly = MT + 16 * static_cast<int>(i);
    std::snprintf(buf, sizeof(buf),
                  "<line x1=\"%d\" y1=\"%d\" x2=\"%d\" y2=\"%d\" stroke=\"%s\" "
                  "stroke-width=\"2\"/><text x=\"%d\" y=\"%d\">%s</text>\n",
                  W - MR + 10, ly, W - MR + 34, ly, color, W - MR + 40, ly + 4,
                  series[i].name.c_str());
    out << buf;
  }
  out << "</svg>\n";
}

int cmd_plot(const std::string& in_dir, const std::string& out_arg) {
  const fs::path in(in_dir);
  const std::string out_dir = out_arg.empty() ? in_dir : out_arg;
  if (!fs::exists(in / "aggregate.csv"))
    throw ConfigError("no aggregate.csv under " + in_dir);
  const std::vector<AggregateRow> agg = read_aggregate_csv((in / "aggregate.csv").string());
  std::vector<NodeBoundRow> bounds;
  if (fs::exists(in / "bounds.csv")) bounds = read_bounds_csv((in / "bounds.csv").string());
  fs::create_directories(out_dir);

  std::vector<std::string> names;
  for (const auto& a : agg)
    if (std::find(names.begin(), names.end(), a.filter) == names.end()) names.push_back(a.filter);

  const auto series_of = [&](auto value) {
    std::vector<Series> out;
    for (const auto& name : names) {
      Series s;
      s.name = name;
      for (const auto& a : agg)
        if (a.filter == name && a.n_valid > 0)
          s.pts.emplace_back(static_cast<double>(a.step), value(a));
      out.push_back(std::move(s));
    }
    return out;
  };

  const fs::path out(out_dir);
  write_chart((out / "ospa_vs_step.svg").string(), "Mean OSPA distance", "step", "ospa",
              series_of([](const AggregateRow& a) { return a.mean_ospa; }));
  write_chart((out / "count_vs_step.svg").string(), "Mean estimated target count", "step",
              "count", series_of([](const AggregateRow& a) { return a.mean_count; }));

  std::vector<Series> scaled = series_of([](const AggregateRow& a) { return a.mean_ospa_sq_scaled; });
  if (!bounds.empty()) {
    Series b;
    b.name = "dpcrlb";
    int last_step = -1;
    for (const auto& r : bounds) {
      if (r.step == last_step || !std::isfinite(r.dpcrlb)) continue;
      b.pts.emplace_back(static_cast<double>(r.step), r.dpcrlb);
      last_step = r.step;
    }
    scaled.push_back(std::move(b));
  }
  write_chart((out / "scaled_ospa_vs_step.svg").string(),
              "Cardinality-scaled squared OSPA vs posterior bound", "step", "scaled ospa^2",
              scaled);

  std::printf("wrote ospa_vs_step.svg, count_vs_step.svg, scaled_ospa_vs_step.svg to %s\n",
              out_dir.c_str());
  return 0;
}

int cmd_bench(int steps, int particles) {
  using clock = std::chrono::steady_clock;
  const auto time_ms = [](auto&& fn) {
    const auto t0 = clock::now();
    fn();
    return std::chrono::duration<double, std::milli>(clock::now() - t0).count();
  };

  std::mt19937_64 eng(12345);
  std::normal_distribution<double> g(0.0, 1.0);
  std::uniform_real_distribution<double> u(-10.0, 10.0);

  const auto cloud = [&](int n) {
    ParticleSet s;
    s.x.resize(4, n);
    for (int i = 0; i < n; ++i)
      for (int d = 0; d < 4; ++d) s.x(d, i) = g(eng);
    s.w = Eigen::VectorXd::Constant(n, 1.0 / n);
    return s;
  };

  MeasurementSet zs;
  for (int j = 0; j < 5; ++j) zs.push_back(Vec2{g(eng), g(eng)});

  const int n1 = std::max(1000, particles * 20);
  ParticleSet small_cloud = cloud(n1), big_cloud = cloud(2 * n1);
  const int reps = 20;
  const double tw1 = time_ms([&] {
    for (int r = 0; r < reps; ++r) {
      const auto lik = likelihood_matrix(small_cloud, zs, 0.1);
      const auto lm = measurement_mass(lik, small_cloud.w, 0.95);
      volatile double sink = bracket_factor(lik, lm, 0.95, 1e-3).sum();
      (void)sink;
    }
  });
  const double tw2 = time_ms([&] {
    for (int r = 0; r < reps; ++r) {
      const auto lik = likelihood_matrix(big_cloud, zs, 0.1);
      const auto lm = measurement_mass(lik, big_cloud.w, 0.95);
      volatile double sink = bracket_factor(lik, lm, 0.95, 1e-3).sum();
      (void)sink;
    }
  });
  std::printf("weighting    %7d particles: %8.2f ms   %7d: %8.2f ms   ratio %.2f\n", n1, tw1,
              2 * n1, tw2, tw2 / tw1);

  const auto points = [&](int n) {
    std::vector<Vec2> p(n);
    for (auto& q : p) q = Vec2{u(eng), u(eng)};
    return p;
  };
  const std::vector<Vec2> p50 = points(50), p100 = points(100);
  const int lreps = 400;
  const double tl1 = time_ms([&] {
    for (int r = 0; r < lreps; ++r) {
      volatile int sink = single_linkage(p50, 1.0).n_clusters;
      (void)sink;
    }
  });
  const double tl2 = time_ms([&] {
    for (int r = 0; r < lreps; ++r) {
      volatile int sink = single_linkage(p100, 1.0).n_clusters;
      (void)sink;
    }
  });
  std::printf("linkage      %7d points:    %8.2f ms   %7d: %8.2f ms   ratio %.2f\n", 50, tl1,
              100, tl2, tl2 / tl1);

  std::mt19937_64 reng(777);
  const double tr = time_ms([&] {
    for (int r = 0; r < reps; ++r) {
      volatile double sink = resample(small_cloud, 1, n1, reng).mass();
      (void)sink;
    }
  });
  std::printf("resample     %7d particles: %8.2f ms\n", n1, tr);

  // one short diffusion run over the small grid
  RunConfig cfg;
  cfg.runs = 1;
  cfg.steps = std::max(1, steps);
  cfg.n_p = std::max(10, particles);
  cfg.jobs = 1;
  cfg.filters = {"dpphdf"};
  cfg.bounds = false;
  const SensorNetwork net = make_grid9_layout();
  Scenario sc;
  TargetTrack t;
  t.id = 1;
  t.entry_step = 0;
  t.waypoints.assign(cfg.steps + 1, Vec2{2.0, -3.0});
  sc.targets.push_back(t);
  const double td = time_ms([&] { run_monte_carlo(cfg, net, sc); });
  std::printf("dpphdf run   %7d steps x %d particles on 9 nodes: %8.2f ms\n", cfg.steps + 1,
              cfg.n_p, td);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Multi-target tracking over a sensor network: centralized and diffusion "
      "particle PHD filters, OSPA scoring and posterior position bounds."};
  app.require_subcommand(1);

  // simulate
  auto* sim = app.add_subcommand(
      "simulate", "Run the Monte Carlo experiment and write runs/aggregate/bounds CSVs");
  std::string s_config, s_filters, s_layout, s_scenario, s_out = "out";
  double s_sigma = 0.0;
  int s_runs = 0, s_steps = 0, s_particles = 0, s_jobs = 0;
  std::uint64_t s_seed = 0;
  bool s_trace = false, s_no_bounds = false;
  auto* o_config =
      sim->add_option("--config", s_config, "TOML config file; flags override file values");
  auto* o_filters =
      sim->add_option("--filters", s_filters, "Comma list of filters: ms,dpphdf,local");
  auto* o_sigma = sim->add_option("--sigma-r2", s_sigma, "Measurement noise variance");
  auto* o_runs = sim->add_option("--runs", s_runs, "Monte Carlo runs");
  auto* o_steps = sim->add_option("--steps", s_steps, "Last step index (a run covers 0..steps)");
  auto* o_particles =
      sim->add_option("--particles", s_particles, "Particles per unit of expected mass");
  auto* o_seed = sim->add_option("--seed", s_seed, "Master seed");
  auto* o_jobs = sim->add_option("--jobs", s_jobs, "Worker threads over runs");
  auto* o_layout =
      sim->add_option("--layout", s_layout, "Layout JSON (default: built-in 30-node grid)");
  auto* o_scenario = sim->add_option("--scenario", s_scenario,
                                     "Scenario JSON (default: built-in three targets)");
  sim->add_flag("--trace", s_trace, "Write a per-step JSONL trace of run 0");
  sim->add_flag("--no-bounds", s_no_bounds, "Skip the posterior bound computation");
  sim->add_option("--out", s_out, "Output directory (default: out)");

  // evaluate
  auto* ev = app.add_subcommand("evaluate", "Summarize an existing runs.csv");
  std::string e_runs_csv, e_out;
  ev->add_option("--runs-csv", e_runs_csv, "Path to runs.csv")->required();
  ev->add_option("--out", e_out, "Also write aggregate.csv to this directory");

  // plot
  auto* pl = app.add_subcommand("plot", "Render SVG charts from simulate output");
  std::string p_in, p_out;
  pl->add_option("--in", p_in, "Directory with aggregate.csv (and optional bounds.csv)")
      ->required();
  pl->add_option("--out", p_out, "Chart output directory (default: same as --in)");

  // bench
  auto* be = app.add_subcommand("bench", "Quick timing self-check of the core kernels");
  int b_steps = 5, b_particles = 200;
  be->add_option("--steps", b_steps, "Steps for the filter timing run");
  be->add_option("--particles", b_particles, "Particles per unit mass for the timing run");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (sim->parsed()) {
      RunConfig cfg;
      if (*o_config) cfg = load_config(s_config);
      if (*o_filters) cfg.filters = split_list(s_filters);
      if (*o_sigma) cfg.sigma_r2 = s_sigma;
      if (*o_runs) cfg.runs = s_runs;
      if (*o_steps) cfg.steps = s_steps;
      if (*o_particles) cfg.n_p = s_particles;
      if (*o_seed) cfg.seed = s_seed;
      if (*o_jobs) cfg.jobs = s_jobs;
      if (*o_layout) cfg.layout = s_layout;
      if (*o_scenario) cfg.scenario = s_scenario;
      if (s_trace) cfg.trace = true;
      if (s_no_bounds) cfg.bounds = false;
      cfg.out_dir = s_out;
      cfg.validate();
      return cmd_simulate(cfg);
    }
    if (ev->parsed()) return cmd_evaluate(e_runs_csv, e_out);
    if (pl->parsed()) return cmd_plot(p_in, p_out);
    if (be->parsed()) return cmd_bench(b_steps, b_particles);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  }
  return 2;
}
