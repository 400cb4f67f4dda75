#pragma once

#include <string>
#include <vector>

#include "phdnet/config.hpp"
#include "phdnet/crlb.hpp"
#include "phdnet/dynamics.hpp"
#include "phdnet/filters.hpp"
#include "phdnet/network.hpp"

namespace phdnet {

struct StepMetricsRow {
  int run = 0;
  int step = 0;
  std::string filter;
  bool null_output = false;  // step 0, or empty truth with empty estimates
  int count = 0;
  double ospa = 0.0;            // NaN on null rows
  double ospa_sq_scaled = 0.0;  // |truth| * ospa^2, NaN on null rows
  long long comm_round1 = 0;
  long long comm_round2 = 0;
};

struct AggregateRow {
  std::string filter;
  int step = 0;
  int n_valid = 0;  // non-null runs at this step
  double mean_count = 0.0;
  double mean_ospa = 0.0;
  double mean_ospa_sq_scaled = 0.0;
  double mean_comm_round1 = 0.0;
  double mean_comm_round2 = 0.0;
};

struct TraceRecord {
  std::string filter;
  std::vector<StepResult> steps;  // run 0 only
};

struct HarnessResult {
  std::vector<StepMetricsRow> rows;    // run-major, then filter order, then step
  std::vector<NodeBoundRow> bounds;    // deterministic, independent of runs
  std::vector<TraceRecord> trace;      // filled when cfg.trace
};

// Monte Carlo sweep: each run draws its own measurement streams (seeded by
// run index only, so widening `runs` never changes earlier runs), feeds the
// same measurements to every enabled filter and scores network-level
// estimates against the deterministic truth. Runs execute in parallel over
// cfg.jobs threads; outputs are ordered by run index regardless.
HarnessResult run_monte_carlo(const RunConfig& cfg, const SensorNetwork& net,
                              const Scenario& scenario);

std::vector<AggregateRow> aggregate(const std::vector<StepMetricsRow>& rows);

// CSV round-trip. Floats are printed with "%.10g".
void write_runs_csv(const std::string& path, const std::vector<StepMetricsRow>& rows);
std::vector<StepMetricsRow> read_runs_csv(const std::string& path);
void write_aggregate_csv(const std::string& path, const std::vector<AggregateRow>& rows);
std::vector<AggregateRow> read_aggregate_csv(const std::string& path);
void write_bounds_csv(const std::string& path, const std::vector<NodeBoundRow>& rows);
std::vector<NodeBoundRow> read_bounds_csv(const std::string& path);
void write_trace_jsonl(const std::string& path, const std::vector<TraceRecord>& trace);

}  // namespace phdnet
