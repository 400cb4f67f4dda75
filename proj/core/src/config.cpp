#include "phdnet/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace phdnet {

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

// cut at the first # outside double quotes
std::string strip_comment(const std::string& line) {
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '"') quoted = !quoted;
    if (line[i] == '#' && !quoted) return line.substr(0, i);
  }
  return line;
}

[[noreturn]] void bad_value(const std::string& key, const std::string& value) {
  throw ConfigError("bad value for " + key + ": " + value);
}

double to_double(const std::string& key, const std::string& value) {
  const std::string v = trim(value);
  double out = 0.0;
  const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
  if (res.ec != std::errc() || res.ptr != v.data() + v.size()) bad_value(key, value);
  return out;
}

long long to_int(const std::string& key, const std::string& value) {
  const std::string v = trim(value);
  long long out = 0;
  const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
  if (res.ec != std::errc() || res.ptr != v.data() + v.size()) bad_value(key, value);
  return out;
}

std::uint64_t to_u64(const std::string& key, const std::string& value) {
  const std::string v = trim(value);
  std::uint64_t out = 0;
  const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
  if (res.ec != std::errc() || res.ptr != v.data() + v.size()) bad_value(key, value);
  return out;
}

bool to_bool(const std::string& key, const std::string& value) {
  const std::string v = trim(value);
  if (v == "true") return true;
  if (v == "false") return false;
  bad_value(key, value);
}

std::string unquote(const std::string& key, const std::string& value) {
  const std::string v = trim(value);
  if (v.size() >= 2 && v.front() == '"' && v.back() == '"') return v.substr(1, v.size() - 2);
  if (v.find('"') != std::string::npos) bad_value(key, value);
  return v;
}

std::vector<std::string> split_list(const std::string& key, const std::string& inner) {
  std::vector<std::string> out;
  std::size_t start = 0;
  bool quoted = false;
  for (std::size_t i = 0; i <= inner.size(); ++i) {
    if (i < inner.size() && inner[i] == '"') quoted = !quoted;
    if (i == inner.size() || (inner[i] == ',' && !quoted)) {
      const std::string item = trim(inner.substr(start, i - start));
      if (!item.empty()) out.push_back(unquote(key, item));
      start = i + 1;
    }
  }
  return out;
}

// ["ms", "dpphdf"], "ms,dpphdf" and bare ms,dpphdf are all accepted
std::vector<std::string> to_string_list(const std::string& key, const std::string& value) {
  const std::string v = trim(value);
  if (v.size() >= 2 && v.front() == '[' && v.back() == ']')
    return split_list(key, v.substr(1, v.size() - 2));
  return split_list(key, unquote(key, v));
}

}  // namespace

void apply_config_entry(RunConfig& cfg, const std::string& key, const std::string& value) {
  if (key == "model.dt") cfg.dt = to_double(key, value);
  else if (key == "model.sigma_r2") cfg.sigma_r2 = to_double(key, value);
  else if (key == "model.sigma_q2") cfg.sigma_q2 = to_double(key, value);
  else if (key == "model.p_d") cfg.p_d = to_double(key, value);
  else if (key == "model.p_s") cfg.p_s = to_double(key, value);
  else if (key == "model.lambda_fa") cfg.lambda_fa = to_double(key, value);
  else if (key == "filter.n_p") cfg.n_p = static_cast<int>(to_int(key, value));
  else if (key == "filter.p_b") cfg.p_b = to_double(key, value);
  else if (key == "filter.sigma_v") cfg.sigma_v = to_double(key, value);
  else if (key == "filter.e_c") cfg.e_c = to_double(key, value);
  else if (key == "filter.k_rough") cfg.k_rough = to_double(key, value);
  else if (key == "filter.tau_extract") cfg.tau_extract = to_double(key, value);
  else if (key == "filter.fusion_cut") cfg.fusion_cut = to_double(key, value);
  else if (key == "filter.per_candidate_birth") cfg.per_candidate_birth = to_bool(key, value);
  else if (key == "filter.weighted_centroids") cfg.weighted_centroids = to_bool(key, value);
  else if (key == "metrics.ospa_c") cfg.ospa_c = to_double(key, value);
  else if (key == "metrics.ospa_p") cfg.ospa_p = to_double(key, value);
  else if (key == "harness.steps") cfg.steps = static_cast<int>(to_int(key, value));
  else if (key == "harness.runs") cfg.runs = static_cast<int>(to_int(key, value));
  else if (key == "harness.jobs") cfg.jobs = static_cast<int>(to_int(key, value));
  else if (key == "harness.seed") cfg.seed = to_u64(key, value);
  else if (key == "harness.particles") cfg.n_p = static_cast<int>(to_int(key, value));
  else if (key == "harness.filters") cfg.filters = to_string_list(key, value);
  else if (key == "harness.layout") cfg.layout = unquote(key, value);
  else if (key == "harness.scenario") cfg.scenario = unquote(key, value);
  else if (key == "harness.bounds") cfg.bounds = to_bool(key, value);
  else if (key == "harness.trace") cfg.trace = to_bool(key, value);
  else if (key == "harness.out_dir") cfg.out_dir = unquote(key, value);
  else throw ConfigError("unknown config key: " + key);
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in.is_open()) throw ConfigError("cannot open config: " + path);
  RunConfig cfg;
  std::string section;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string body = trim(strip_comment(line));
    if (body.empty()) continue;
    if (body.front() == '[') {
      if (body.back() != ']') throw ConfigError(path + ":" + std::to_string(lineno) + ": bad table header");
      section = trim(body.substr(1, body.size() - 2));
      if (section.empty()) throw ConfigError(path + ":" + std::to_string(lineno) + ": empty table name");
      continue;
    }
    const auto eq = body.find('=');
    if (eq == std::string::npos)
      throw ConfigError(path + ":" + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(body.substr(0, eq));
    const std::string value = trim(body.substr(eq + 1));
    if (key.empty() || value.empty())
      throw ConfigError(path + ":" + std::to_string(lineno) + ": expected key = value");
    apply_config_entry(cfg, section.empty() ? key : section + "." + key, value);
  }
  cfg.validate();
  return cfg;
}

FilterParams RunConfig::filter_params() const {
  FilterParams p;
  p.phd.motion = CvModel{dt, sigma_q2};
  p.phd.sigma_r2 = sigma_r2;
  p.phd.p_d = p_d;
  p.phd.p_s = p_s;
  p.phd.p_b = p_b;
  p.phd.sigma_v = sigma_v;
  p.phd.e_c = e_c;
  p.phd.k_rough = k_rough;
  p.phd.n_p = n_p;
  p.phd.per_candidate_birth = per_candidate_birth;
  p.lambda_fa = lambda_fa;
  p.tau_extract = tau_extract;
  p.fusion_cut = fusion_cut;
  p.weighted_centroids = weighted_centroids;
  return p;
}

SensingModel RunConfig::sensing_model() const {
  SensingModel m;
  m.sigma_r2 = sigma_r2;
  m.p_d = p_d;
  m.lambda_fa = lambda_fa;
  return m;
}

DpcrlbParams RunConfig::crlb_params() const {
  DpcrlbParams p;
  p.motion = CvModel{dt, 0.0};  // deterministic truth
  p.sigma_r2 = sigma_r2;
  p.p_d = p_d;
  p.sigma_v = sigma_v;
  return p;
}

void RunConfig::validate() const {
  if (filters.empty()) throw ConfigError("no filters selected");
  for (const auto& f : filters)
    if (f != "ms" && f != "dpphdf" && f != "local")
      throw ConfigError("unknown filter: " + f + " (expected ms, dpphdf or local)");
  if (runs < 1) throw ConfigError("runs must be at least 1");
  if (steps < 0) throw ConfigError("steps must be nonnegative");
  if (jobs < 1) throw ConfigError("jobs must be at least 1");
  if (n_p < 1) throw ConfigError("n_p must be at least 1");
  if (!(dt > 0.0)) throw ConfigError("dt must be positive");
  if (!(sigma_r2 > 0.0)) throw ConfigError("sigma_r2 must be positive");
  if (sigma_q2 < 0.0) throw ConfigError("sigma_q2 must be nonnegative");
  if (!(p_d > 0.0 && p_d <= 1.0)) throw ConfigError("p_d must be in (0, 1]");
  if (!(p_s > 0.0 && p_s <= 1.0)) throw ConfigError("p_s must be in (0, 1]");
  if (lambda_fa < 0.0) throw ConfigError("lambda_fa must be nonnegative");
  if (!(ospa_c > 0.0)) throw ConfigError("ospa_c must be positive");
  if (!(ospa_p >= 1.0)) throw ConfigError("ospa_p must be at least 1");
  if (!(tau_extract >= 0.0)) throw ConfigError("tau_extract must be nonnegative");
  if (!(fusion_cut >= 0.0)) throw ConfigError("fusion_cut must be nonnegative");
}

}  // namespace phdnet
