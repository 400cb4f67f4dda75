#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "phdnet/config.hpp"

using namespace phdnet;

namespace {

std::string write_temp(const std::string& body) {
  static int counter = 0;
  auto path = (std::filesystem::temp_directory_path() /
               ("phdnet_cfg_" + std::to_string(counter++) + ".toml"))
                  .string();
  std::ofstream out(path);
  out << body;
  return path;
}

}  // namespace

TEST_CASE("defaults carry the reference constants") {
  RunConfig c;
  CHECK(c.dt == 1.0);
  CHECK(c.sigma_r2 == 0.1);
  CHECK(c.sigma_q2 == 0.01);
  CHECK(c.p_d == 0.95);
  CHECK(c.p_s == 0.98);
  CHECK(c.lambda_fa == 0.1);
  CHECK(c.n_p == 500);
  CHECK(c.p_b == 0.8);
  CHECK(c.sigma_v == 1.0);
  CHECK(c.e_c == 6.0);
  CHECK(c.k_rough == 0.2);
  CHECK(c.tau_extract == 4.0);
  CHECK(c.ospa_c == 2.0);
  CHECK(c.ospa_p == 2.0);
  CHECK(c.steps == 30);
  CHECK(c.runs == 100);
  CHECK(c.filters == std::vector<std::string>{"ms", "dpphdf", "local"});
  CHECK_FALSE(c.per_candidate_birth);
  CHECK(c.weighted_centroids);

  // derived parameter bundles agree
  CHECK(c.filter_params().phd.p_d == 0.95);
  CHECK(c.filter_params().lambda_fa == 0.1);
  CHECK(c.sensing_model().sigma_r2 == 0.1);
  // the bound runs on the deterministic truth model, not the filter's
  CHECK(c.crlb_params().motion.sigma_q2 == 0.0);
  CHECK(c.crlb_params().motion.dt == 1.0);
  CHECK(c.crlb_params().sigma_r2 == 0.1);
  CHECK_NOTHROW(c.validate());
}

TEST_CASE("the shipped reference config equals the defaults") {
  RunConfig file = load_config(std::string(PHDNET_DATA_DIR) + "/configs/paper.toml");
  RunConfig def;
  CHECK(file.sigma_r2 == def.sigma_r2);
  CHECK(file.sigma_q2 == def.sigma_q2);
  CHECK(file.p_d == def.p_d);
  CHECK(file.p_s == def.p_s);
  CHECK(file.lambda_fa == def.lambda_fa);
  CHECK(file.n_p == def.n_p);
  CHECK(file.p_b == def.p_b);
  CHECK(file.e_c == def.e_c);
  CHECK(file.k_rough == def.k_rough);
  CHECK(file.steps == def.steps);
  CHECK(file.runs == def.runs);
  CHECK(file.seed == def.seed);
  CHECK(file.filters == def.filters);
}

TEST_CASE("overrides, comments and whitespace") {
  auto path = write_temp(R"(
# comment
[model]
sigma_r2 = 0.3   # trailing comment
p_d = 0.9

[harness]
runs = 5
seed = 123456789012345
filters = ["ms"]
trace = true
)");
  RunConfig c = load_config(path);
  CHECK(c.sigma_r2 == 0.3);
  CHECK(c.p_d == 0.9);
  CHECK(c.runs == 5);
  CHECK(c.seed == 123456789012345ull);
  CHECK(c.filters == std::vector<std::string>{"ms"});
  CHECK(c.trace);
  CHECK(c.sigma_q2 == 0.01);  // untouched default
  std::remove(path.c_str());
}

TEST_CASE("errors: unknown keys, bad values, bad filters, missing file") {
  auto bad_key = write_temp("[model]\nsigma_z9 = 1.0\n");
  CHECK_THROWS_AS(load_config(bad_key), ConfigError);
  std::remove(bad_key.c_str());

  auto bad_val = write_temp("[harness]\nruns = banana\n");
  CHECK_THROWS_AS(load_config(bad_val), ConfigError);
  std::remove(bad_val.c_str());

  auto bad_line = write_temp("[model]\nthis is not toml\n");
  CHECK_THROWS_AS(load_config(bad_line), ConfigError);
  std::remove(bad_line.c_str());

  auto bad_filter = write_temp("[harness]\nfilters = [\"warp\"]\n");
  CHECK_THROWS_AS(load_config(bad_filter), ConfigError);
  std::remove(bad_filter.c_str());

  CHECK_THROWS_AS(load_config("/nonexistent/path/x.toml"), ConfigError);

  RunConfig c;
  c.filters = {"ms", "bogus"};
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c.filters = {};
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = RunConfig{};
  c.runs = 0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
}

TEST_CASE("apply_config_entry handles every section") {
  RunConfig c;
  apply_config_entry(c, "model.sigma_r2", "0.3");
  apply_config_entry(c, "filter.n_p", "100");
  apply_config_entry(c, "filter.fusion_cut", "3.5");
  apply_config_entry(c, "metrics.ospa_c", "4");
  apply_config_entry(c, "harness.steps", "10");
  apply_config_entry(c, "harness.jobs", "4");
  CHECK(c.sigma_r2 == 0.3);
  CHECK(c.n_p == 100);
  CHECK(c.fusion_cut == 3.5);
  CHECK(c.ospa_c == 4.0);
  CHECK(c.steps == 10);
  CHECK(c.jobs == 4);
  CHECK_THROWS_AS(apply_config_entry(c, "model.unknown", "1"), ConfigError);
}
