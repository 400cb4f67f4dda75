#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <nlohmann/json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

// End-to-end checks against the installed binary. PHDNET_CLI_PATH and
// PHDNET_DATA_DIR are injected by the build.

namespace fs = std::filesystem;

namespace {

int run_cli(const std::string& args) {
  const std::string cmd = std::string(PHDNET_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  int rc = std::system(cmd.c_str());
  REQUIRE(rc != -1);
  return WEXITSTATUS(rc);
}

std::string capture_cli(const std::string& args) {
  const auto tmp = fs::temp_directory_path() / "phdnet_cli_capture.txt";
  const std::string cmd =
      std::string(PHDNET_CLI_PATH) + " " + args + " >" + tmp.string() + " 2>&1";
  std::system(cmd.c_str());
  std::ifstream in(tmp);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path fresh_dir(const char* tag) {
  auto d = fs::temp_directory_path() / (std::string("phdnet_cli_") + tag);
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

std::string data_path(const char* rel) {
  return (fs::path(PHDNET_DATA_DIR) / rel).string();
}

}  // namespace

TEST_CASE("help and version exit cleanly") {
  CHECK(run_cli("--help") == 0);
  CHECK(run_cli("simulate --help") == 0);
  auto text = capture_cli("--help");
  CHECK(text.find("simulate") != std::string::npos);
  CHECK(text.find("evaluate") != std::string::npos);
  CHECK(text.find("plot") != std::string::npos);
  CHECK(text.find("bench") != std::string::npos);
}

TEST_CASE("usage errors exit 2") {
  CHECK(run_cli("--definitely-not-a-flag") == 2);
  CHECK(run_cli("simulate --filters ms,bogus --runs 1 --steps 2") == 2);
  CHECK(run_cli("simulate --config /nonexistent/path.toml") == 2);
  CHECK(run_cli("simulate --runs 0") == 2);
  CHECK(run_cli("frobnicate") == 2);
}

TEST_CASE("simulate writes the expected artifacts") {
  auto out = fresh_dir("sim");
  const std::string args = "simulate --runs 2 --steps 4 --particles 80 --seed 99 "
                           "--filters ms,dpphdf,local --out " +
                           out.string();
  CHECK(run_cli(args) == 0);
  CHECK(fs::exists(out / "runs.csv"));
  CHECK(fs::exists(out / "aggregate.csv"));
  CHECK(fs::exists(out / "bounds.csv"));

  std::ifstream in(out / "runs.csv");
  std::string header;
  std::getline(in, header);
  CHECK(header.find("run") != std::string::npos);
  CHECK(header.find("ospa") != std::string::npos);
  int lines = 0;
  std::string line;
  while (std::getline(in, line))
    if (!line.empty()) ++lines;
  CHECK(lines == 2 * 3 * 5);
}

TEST_CASE("simulate honors a config file and flag overrides") {
  auto out = fresh_dir("cfg");
  auto cfg_path = out / "small.toml";
  {
    std::ofstream cfg(cfg_path);
    cfg << "[harness]\n"
        << "runs = 1\n"
        << "steps = 3\n"
        << "particles = 60\n"
        << "filters = \"dpphdf\"\n";
  }
  CHECK(run_cli("simulate --config " + cfg_path.string() + " --out " +
                (out / "a").string()) == 0);
  std::ifstream in(out / "a" / "runs.csv");
  std::string line;
  std::getline(in, line);
  int lines = 0;
  while (std::getline(in, line))
    if (!line.empty()) ++lines;
  CHECK(lines == 1 * 1 * 4);

  // flag wins over file
  CHECK(run_cli("simulate --config " + cfg_path.string() +
                " --runs 2 --out " + (out / "b").string()) == 0);
  std::ifstream in2(out / "b" / "runs.csv");
  std::getline(in2, line);
  lines = 0;
  while (std::getline(in2, line))
    if (!line.empty()) ++lines;
  CHECK(lines == 2 * 1 * 4);
}

TEST_CASE("simulate determinism: same seed, same bytes") {
  auto out1 = fresh_dir("det1");
  auto out2 = fresh_dir("det2");
  const std::string base = "simulate --runs 1 --steps 3 --particles 60 --seed 7 "
                           "--filters ms --out ";
  CHECK(run_cli(base + out1.string()) == 0);
  CHECK(run_cli(base + out2.string()) == 0);
  std::ifstream a(out1 / "runs.csv"), b(out2 / "runs.csv");
  std::stringstream sa, sb;
  sa << a.rdbuf();
  sb << b.rdbuf();
  CHECK(sa.str() == sb.str());
  CHECK(!sa.str().empty());
}

TEST_CASE("unwritable output directory exits 3") {
  CHECK(run_cli("simulate --runs 1 --steps 2 --particles 40 --filters local "
                "--out /proc/definitely/not/writable") == 3);
}

TEST_CASE("simulate accepts explicit layout and scenario files") {
  auto out = fresh_dir("files");
  const std::string args = "simulate --runs 1 --steps 3 --particles 60 "
                           "--filters local --layout " +
                           data_path("layouts/grid30.json") + " --scenario " +
                           data_path("scenarios/three_targets.json") + " --out " +
                           out.string();
  CHECK(run_cli(args) == 0);
  CHECK(fs::exists(out / "runs.csv"));
}

TEST_CASE("trace flag emits parseable json lines") {
  auto out = fresh_dir("trace");
  CHECK(run_cli("simulate --runs 1 --steps 3 --particles 60 --filters dpphdf "
                "--trace --out " +
                out.string()) == 0);
  REQUIRE(fs::exists(out / "trace.jsonl"));
  std::ifstream in(out / "trace.jsonl");
  std::string line;
  int lines = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto j = nlohmann::json::parse(line);
    CHECK(j.contains("step"));
    CHECK(j.contains("nodes"));
    ++lines;
  }
  CHECK(lines == 4);
}

TEST_CASE("evaluate summarizes an existing runs.csv") {
  auto out = fresh_dir("eval");
  CHECK(run_cli("simulate --runs 2 --steps 3 --particles 60 --filters ms,local "
                "--out " +
                out.string()) == 0);
  auto text = capture_cli("evaluate --runs-csv " + (out / "runs.csv").string());
  CHECK(text.find("ms") != std::string::npos);
  CHECK(text.find("local") != std::string::npos);
  CHECK(text.find("ospa") != std::string::npos);
  CHECK(run_cli("evaluate --runs-csv /nonexistent/runs.csv") == 2);
}

TEST_CASE("plot renders svg files from aggregate output") {
  auto out = fresh_dir("plot");
  CHECK(run_cli("simulate --runs 1 --steps 3 --particles 60 --filters ms,dpphdf "
                "--out " +
                out.string()) == 0);
  CHECK(run_cli("plot --in " + out.string() + " --out " + out.string()) == 0);
  bool found_svg = false;
  for (const auto& e : fs::directory_iterator(out)) {
    if (e.path().extension() == ".svg") {
      found_svg = true;
      std::ifstream in(e.path());
      std::stringstream ss;
      ss << in.rdbuf();
      CHECK(ss.str().find("<svg") != std::string::npos);
    }
  }
  CHECK(found_svg);
  CHECK(run_cli("plot --in /nonexistent/dir --out " + out.string()) == 2);
}

TEST_CASE("bench subcommand runs a quick self-check") {
  CHECK(run_cli("bench --steps 3 --particles 60") == 0);
}
