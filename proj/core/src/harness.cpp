#include "phdnet/harness.hpp"

#include <nlohmann/json.hpp>

#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <limits>
#include <memory>
#include <mutex>
#include <sstream>
#include <thread>

#include "phdnet/metrics.hpp"
#include "phdnet/rng.hpp"
#include "phdnet/sensing.hpp"

namespace phdnet {

namespace {

// one enabled filter of any flavor
struct AnyFilter {
  std::unique_ptr<MsPphdFilter> ms;
  std::unique_ptr<DiffusionPphdFilter> diff;
  std::unique_ptr<LocalPphdFilter> local;

  static AnyFilter make(const std::string& name, const SensorNetwork& net,
                        const FilterParams& fp, std::uint64_t run_seed) {
    AnyFilter f;
    if (name == "ms") f.ms = std::make_unique<MsPphdFilter>(net, fp, run_seed);
    else if (name == "dpphdf") f.diff = std::make_unique<DiffusionPphdFilter>(net, fp, run_seed);
    else f.local = std::make_unique<LocalPphdFilter>(net, fp, run_seed);
    return f;
  }

  StepResult step(const std::vector<MeasurementSet>& zs) {
    if (ms) return ms->step(zs);
    if (diff) return diff->step(zs);
    return local->step(zs);
  }
};

struct RunOutput {
  std::vector<StepMetricsRow> rows;
  std::vector<TraceRecord> trace;
};

RunOutput eval_run(const RunConfig& cfg, const SensorNetwork& net, const Scenario& scenario,
                   int run) {
  const std::uint64_t rs = rng::run_seed(cfg.seed, static_cast<std::uint64_t>(run));
  const FilterParams fp = cfg.filter_params();
  const SensingModel sm = cfg.sensing_model();
  const int nf = static_cast<int>(cfg.filters.size());
  const bool tracing = cfg.trace && run == 0;

  std::vector<AnyFilter> filters;
  filters.reserve(nf);
  for (const auto& name : cfg.filters) filters.push_back(AnyFilter::make(name, net, fp, rs));

  RunOutput out;
  out.rows.resize(static_cast<std::size_t>(nf) * (cfg.steps + 1));
  if (tracing) {
    out.trace.resize(nf);
    for (int i = 0; i < nf; ++i) out.trace[i].filter = cfg.filters[i];
  }

  for (int step = 0; step <= cfg.steps; ++step) {
    const std::vector<Vec4> truths = scenario.true_states(step);
    const std::vector<Vec2> truth_pos = scenario.true_positions(step);
    const std::vector<MeasurementSet> zs = sense_network(net, truths, sm, rs, step);

    for (int i = 0; i < nf; ++i) {
      StepResult r = filters[i].step(zs);
      StepMetricsRow& row = out.rows[static_cast<std::size_t>(i) * (cfg.steps + 1) + step];
      row.run = run;
      row.step = step;
      row.filter = cfg.filters[i];
      row.comm_round1 = r.comm_round1;
      row.comm_round2 = r.comm_round2;

      std::vector<Vec2> est_pos;
      est_pos.reserve(r.estimates.size());
      for (const auto& e : r.estimates) est_pos.push_back(e.head<2>());

      // step 0 has no usable output by construction; later steps are null
      // only when both truth and estimates are empty (nothing to score)
      row.null_output = step == 0 || (truth_pos.empty() && est_pos.empty());
      if (row.null_output) {
        row.count = 0;
        row.ospa = std::numeric_limits<double>::quiet_NaN();
        row.ospa_sq_scaled = std::numeric_limits<double>::quiet_NaN();
      } else {
        row.count = r.count;
        row.ospa = ospa(truth_pos, est_pos, cfg.ospa_c, cfg.ospa_p);
        row.ospa_sq_scaled = ospa_scaled_sq(est_pos, truth_pos, cfg.ospa_c, cfg.ospa_p);
      }
      if (tracing) out.trace[i].steps.push_back(std::move(r));
    }
  }
  return out;
}

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= line.size(); ++i) {
    if (i == line.size() || line[i] == ',') {
      out.push_back(line.substr(start, i - start));
      start = i + 1;
    }
  }
  return out;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out.is_open()) throw std::runtime_error("cannot write " + path);
  return out;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path);
  if (!in.is_open()) throw std::runtime_error("cannot read " + path);
  return in;
}

}  // namespace

HarnessResult run_monte_carlo(const RunConfig& cfg, const SensorNetwork& net,
                              const Scenario& scenario) {
  cfg.validate();
  HarnessResult result;

  std::vector<RunOutput> outputs(cfg.runs);
  const int jobs = std::min(cfg.jobs, cfg.runs);
  if (jobs <= 1) {
    for (int run = 0; run < cfg.runs; ++run) outputs[run] = eval_run(cfg, net, scenario, run);
  } else {
    std::atomic<int> next{0};
    std::exception_ptr error;
    std::mutex error_mu;
    std::vector<std::thread> pool;
    pool.reserve(jobs);
    for (int j = 0; j < jobs; ++j)
      pool.emplace_back([&] {
        try {
          for (int run = next.fetch_add(1); run < cfg.runs; run = next.fetch_add(1))
            outputs[run] = eval_run(cfg, net, scenario, run);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mu);
          if (!error) error = std::current_exception();
        }
      });
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
  }

  for (auto& o : outputs) {
    result.rows.insert(result.rows.end(), std::make_move_iterator(o.rows.begin()),
                       std::make_move_iterator(o.rows.end()));
    if (!o.trace.empty()) result.trace = std::move(o.trace);
  }

  if (cfg.bounds) {
    std::vector<NodeBoundRow> all = compute_dpcrlb(net, scenario, cfg.crlb_params());
    result.bounds.reserve(all.size());
    for (const auto& r : all)
      if (r.step <= cfg.steps) result.bounds.push_back(r);
  }
  return result;
}

std::vector<AggregateRow> aggregate(const std::vector<StepMetricsRow>& rows) {
  // keyed by (filter, step), ordered by first occurrence
  std::vector<AggregateRow> out;
  auto find = [&](const std::string& filter, int step) -> AggregateRow& {
    for (auto& a : out)
      if (a.step == step && a.filter == filter) return a;
    AggregateRow a;
    a.filter = filter;
    a.step = step;
    out.push_back(std::move(a));
    return out.back();
  };
  for (const auto& r : rows) {
    AggregateRow& a = find(r.filter, r.step);
    if (r.null_output) continue;
    ++a.n_valid;
    a.mean_count += r.count;
    a.mean_ospa += r.ospa;
    a.mean_ospa_sq_scaled += r.ospa_sq_scaled;
    a.mean_comm_round1 += static_cast<double>(r.comm_round1);
    a.mean_comm_round2 += static_cast<double>(r.comm_round2);
  }
  for (auto& a : out) {
    if (a.n_valid == 0) continue;
    a.mean_count /= a.n_valid;
    a.mean_ospa /= a.n_valid;
    a.mean_ospa_sq_scaled /= a.n_valid;
    a.mean_comm_round1 /= a.n_valid;
    a.mean_comm_round2 /= a.n_valid;
  }
  return out;
}

void write_runs_csv(const std::string& path, const std::vector<StepMetricsRow>& rows) {
  auto out = open_out(path);
  out << "run,step,filter,null,count,ospa,ospa_sq_scaled,comm_round1,comm_round2\n";
  for (const auto& r : rows)
    out << r.run << ',' << r.step << ',' << r.filter << ',' << (r.null_output ? 1 : 0) << ','
        << r.count << ',' << fmt_double(r.ospa) << ',' << fmt_double(r.ospa_sq_scaled) << ','
        << r.comm_round1 << ',' << r.comm_round2 << '\n';
}

std::vector<StepMetricsRow> read_runs_csv(const std::string& path) {
  auto in = open_in(path);
  std::vector<StepMetricsRow> rows;
  std::string line;
  std::getline(in, line);  // header
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = split_csv_line(line);
    if (f.size() != 9) throw std::runtime_error("bad runs csv line: " + line);
    StepMetricsRow r;
    r.run = std::atoi(f[0].c_str());
    r.step = std::atoi(f[1].c_str());
    r.filter = f[2];
    r.null_output = f[3] == "1";
    r.count = std::atoi(f[4].c_str());
    r.ospa = std::strtod(f[5].c_str(), nullptr);
    r.ospa_sq_scaled = std::strtod(f[6].c_str(), nullptr);
    r.comm_round1 = std::atoll(f[7].c_str());
    r.comm_round2 = std::atoll(f[8].c_str());
    rows.push_back(std::move(r));
  }
  return rows;
}

void write_aggregate_csv(const std::string& path, const std::vector<AggregateRow>& rows) {
  auto out = open_out(path);
  out << "filter,step,n_valid,mean_count,mean_ospa,mean_ospa_sq_scaled,"
         "mean_comm_round1,mean_comm_round2\n";
  for (const auto& a : rows)
    out << a.filter << ',' << a.step << ',' << a.n_valid << ',' << fmt_double(a.mean_count)
        << ',' << fmt_double(a.mean_ospa) << ',' << fmt_double(a.mean_ospa_sq_scaled) << ','
        << fmt_double(a.mean_comm_round1) << ',' << fmt_double(a.mean_comm_round2) << '\n';
}

std::vector<AggregateRow> read_aggregate_csv(const std::string& path) {
  auto in = open_in(path);
  std::vector<AggregateRow> rows;
  std::string line;
  std::getline(in, line);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = split_csv_line(line);
    if (f.size() != 8) throw std::runtime_error("bad aggregate csv line: " + line);
    AggregateRow a;
    a.filter = f[0];
    a.step = std::atoi(f[1].c_str());
    a.n_valid = std::atoi(f[2].c_str());
    a.mean_count = std::strtod(f[3].c_str(), nullptr);
    a.mean_ospa = std::strtod(f[4].c_str(), nullptr);
    a.mean_ospa_sq_scaled = std::strtod(f[5].c_str(), nullptr);
    a.mean_comm_round1 = std::strtod(f[6].c_str(), nullptr);
    a.mean_comm_round2 = std::strtod(f[7].c_str(), nullptr);
    rows.push_back(std::move(a));
  }
  return rows;
}

void write_bounds_csv(const std::string& path, const std::vector<NodeBoundRow>& rows) {
  auto out = open_out(path);
  out << "step,node,n_targets,bound,m_size,dpcrlb\n";
  for (const auto& r : rows)
    out << r.step << ',' << r.node_id << ',' << r.n_targets << ',' << fmt_double(r.bound_sum)
        << ',' << r.m_size << ',' << fmt_double(r.dpcrlb) << '\n';
}

std::vector<NodeBoundRow> read_bounds_csv(const std::string& path) {
  auto in = open_in(path);
  std::vector<NodeBoundRow> rows;
  std::string line;
  std::getline(in, line);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = split_csv_line(line);
    if (f.size() != 6) throw std::runtime_error("bad bounds csv line: " + line);
    NodeBoundRow r;
    r.step = std::atoi(f[0].c_str());
    r.node_id = std::atoi(f[1].c_str());
    r.n_targets = std::atoi(f[2].c_str());
    r.bound_sum = std::strtod(f[3].c_str(), nullptr);
    r.bound_mean = r.n_targets > 0 ? r.bound_sum / r.n_targets : 0.0;
    r.m_size = std::atoi(f[4].c_str());
    r.dpcrlb = std::strtod(f[5].c_str(), nullptr);
    rows.push_back(r);
  }
  return rows;
}

void write_trace_jsonl(const std::string& path, const std::vector<TraceRecord>& trace) {
  auto out = open_out(path);
  for (const auto& rec : trace) {
    for (const auto& s : rec.steps) {
      nlohmann::json j;
      j["filter"] = rec.filter;
      j["step"] = s.step;
      j["count"] = s.count;
      j["comm_round1"] = s.comm_round1;
      j["comm_round2"] = s.comm_round2;
      auto& ests = j["estimates"] = nlohmann::json::array();
      for (const auto& e : s.estimates) ests.push_back({e(0), e(1), e(2), e(3)});
      auto& nodes = j["nodes"] = nlohmann::json::array();
      for (const auto& nr : s.nodes) {
        nlohmann::json nj;
        nj["node"] = nr.node;
        nj["active"] = nr.active;
        nj["adopted"] = nr.adopted;
        nj["n_meas"] = nr.n_meas;
        nj["mass"] = nr.mass;
        nj["n_hat"] = nr.n_hat;
        auto& ne = nj["estimates"] = nlohmann::json::array();
        for (const auto& e : nr.estimates) ne.push_back({e(0), e(1), e(2), e(3)});
        nodes.push_back(std::move(nj));
      }
      out << j.dump() << '\n';
    }
  }
}

}  // namespace phdnet
