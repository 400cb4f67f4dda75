#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "phdnet/crlb.hpp"
#include "phdnet/filters.hpp"
#include "phdnet/sensing.hpp"

namespace phdnet {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// One experiment: model constants, filter knobs, metric and harness
// settings. Defaults reproduce the reference study at sigma_r2 = 0.1.
struct RunConfig {
  // model
  double dt = 1.0;
  double sigma_r2 = 0.1;
  double sigma_q2 = 0.01;
  double p_d = 0.95;
  double p_s = 0.98;
  double lambda_fa = 0.1;

  // filter
  int n_p = 500;
  double p_b = 0.8;
  double sigma_v = 1.0;
  double e_c = 6.0;
  double k_rough = 0.2;
  double tau_extract = 4.0;
  double fusion_cut = 2.5;
  bool per_candidate_birth = false;
  bool weighted_centroids = true;

  // metrics
  double ospa_c = 2.0;
  double ospa_p = 2.0;

  // harness
  int steps = 30;
  int runs = 100;
  int jobs = 1;
  std::uint64_t seed = 20240817ull;
  std::vector<std::string> filters{"ms", "dpphdf", "local"};
  std::string layout;    // empty: built-in 30-node layout
  std::string scenario;  // empty: built-in three-target scenario
  bool bounds = true;
  bool trace = false;
  std::string out_dir = "out";

  FilterParams filter_params() const;
  SensingModel sensing_model() const;
  DpcrlbParams crlb_params() const;
  // Throws ConfigError for unknown filter names.
  void validate() const;
};

// Overlay `section.key = value` pairs from a small TOML subset (tables,
// scalars, string arrays, comments) onto the defaults. Unknown keys raise
// ConfigError.
RunConfig load_config(const std::string& path);
void apply_config_entry(RunConfig& cfg, const std::string& key, const std::string& value);

}  // namespace phdnet
