#include "hardedge/config.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "hardedge/error.hpp"

namespace hardedge {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

[[noreturn]] void fail(const std::string& key, const std::string& msg) {
  throw Error(ErrorCode::ConfigError, key + ": " + msg);
}

double parse_double(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || ptr != t.data() + t.size() || t.empty()) fail(key, "expected a number, got '" + t + "'");
  return v;
}

std::uint64_t parse_uint(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || ptr != t.data() + t.size() || t.empty()) {
    fail(key, "expected a non-negative integer, got '" + t + "'");
  }
  return v;
}

std::vector<std::string> parse_array(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  if (t.size() < 2 || t.front() != '[' || t.back() != ']') fail(key, "expected a bracketed array");
  std::vector<std::string> items;
  const std::string body = trim(t.substr(1, t.size() - 2));
  if (body.empty()) return items;
  std::stringstream ss(body);
  std::string item;
  while (std::getline(ss, item, ',')) items.push_back(trim(item));
  return items;
}

std::string parse_string(const std::string& text) {
  std::string t = trim(text);
  if (t.size() >= 2 && t.front() == '"' && t.back() == '"') t = t.substr(1, t.size() - 2);
  return t;
}

bool parse_bool(const std::string& key, const std::string& text) {
  const std::string t = parse_string(text);
  if (t == "true" || t == "1") return true;
  if (t == "false" || t == "0") return false;
  fail(key, "expected true or false");
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

template <class T>
std::string fmt_array(const std::vector<T>& v) {
  std::string s = "[";
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ", ";
    if constexpr (std::is_floating_point_v<T>) {
      s += fmt(v[i]);
    } else {
      s += std::to_string(v[i]);
    }
  }
  return s + "]";
}

struct Field {
  std::function<void(ExperimentConfig&, const std::string&)> set;
  std::function<std::string(const ExperimentConfig&)> get;
};

#define HE_DOUBLE(name) \
  {#name, {[](ExperimentConfig& c, const std::string& v) { c.name = parse_double(#name, v); }, \
           [](const ExperimentConfig& c) { return fmt(c.name); }}}
#define HE_UINT(name) \
  {#name, {[](ExperimentConfig& c, const std::string& v) { c.name = parse_uint(#name, v); }, \
           [](const ExperimentConfig& c) { return std::to_string(c.name); }}}
#define HE_STRING(name) \
  {#name, {[](ExperimentConfig& c, const std::string& v) { c.name = parse_string(v); }, \
           [](const ExperimentConfig& c) { return "\"" + c.name + "\""; }}}
#define HE_BOOL(name) \
  {#name, {[](ExperimentConfig& c, const std::string& v) { c.name = parse_bool(#name, v); }, \
           [](const ExperimentConfig& c) { return std::string(c.name ? "true" : "false"); }}}
#define HE_DOUBLES(name)                                                            \
  {#name, {[](ExperimentConfig& c, const std::string& v) {                          \
             c.name.clear();                                                        \
             for (const auto& item : parse_array(#name, v)) c.name.push_back(parse_double(#name, item)); \
           },                                                                       \
           [](const ExperimentConfig& c) { return fmt_array(c.name); }}}

// Fixed order; canonical_text() and the hash follow it.
const std::vector<std::pair<std::string, Field>>& fields() {
  static const std::vector<std::pair<std::string, Field>> table = {
      HE_STRING(experiment),
      HE_DOUBLES(potential),
      HE_DOUBLES(compare_potential),
      HE_DOUBLE(beta),
      HE_DOUBLE(a),
      {"sizes",
       {[](ExperimentConfig& c, const std::string& v) {
          c.sizes.clear();
          for (const auto& item : parse_array("sizes", v)) c.sizes.push_back(parse_uint("sizes", item));
        },
        [](const ExperimentConfig& c) { return fmt_array(c.sizes); }}},
      HE_UINT(replicas),
      {"k",
       {[](ExperimentConfig& c, const std::string& v) { c.k = static_cast<int>(parse_uint("k", v)); },
        [](const ExperimentConfig& c) { return std::to_string(c.k); }}},
      HE_STRING(sampler),
      HE_UINT(chains),
      HE_UINT(thin),
      HE_UINT(burn_in),
      HE_UINT(sbo_cells),
      HE_DOUBLE(sbo_eps),
      HE_UINT(sbo_replicas),
      HE_UINT(sbo_self_checks),
      HE_DOUBLE(sbo_grid_tolerance),
      HE_DOUBLE(ks_threshold),
      HE_DOUBLE(control_alpha),
      HE_UINT(bootstrap_resamples),
      HE_DOUBLE(mean_s),
      HE_DOUBLE(mean_t),
      HE_DOUBLE(mean_min_order),
      HE_DOUBLE(var_block_start),
      HE_DOUBLE(var_ratio_low),
      HE_DOUBLE(var_ratio_high),
      HE_BOOL(var_beta_scaling),
      HE_DOUBLE(var_beta_tolerance),
      HE_DOUBLES(clt_times),
      HE_DOUBLE(clt_var_tolerance),
      HE_DOUBLE(clt_ks_threshold),
      HE_DOUBLE(clt_mean_tolerance),
      HE_DOUBLE(clt_cov_tolerance),
      HE_DOUBLE(clt_increment_corr),
      HE_DOUBLE(clt_endpoint_var),
      HE_DOUBLE(phi_tolerance),
      HE_UINT(master_seed),
      HE_STRING(output_dir),
  };
  return table;
}

#undef HE_DOUBLE
#undef HE_UINT
#undef HE_STRING
#undef HE_BOOL
#undef HE_DOUBLES

const Field& field(const std::string& key) {
  for (const auto& [name, f] : fields()) {
    if (name == key) return f;
  }
  throw Error(ErrorCode::ConfigError, "unknown key '" + key + "'");
}

std::string strip_comment(const std::string& line) {
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '"') quoted = !quoted;
    if (line[i] == '#' && !quoted) return line.substr(0, i);
  }
  return line;
}

}  // namespace

void apply_config_text(ExperimentConfig& cfg, std::istream& in, const std::string& source) {
  std::set<std::string> seen;
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    const std::string body = trim(strip_comment(line));
    if (body.empty()) continue;
    const auto eq = body.find('=');
    const std::string where = source + ":" + std::to_string(number);
    if (eq == std::string::npos) throw Error(ErrorCode::ConfigError, where + ": expected 'key = value'");
    const std::string key = trim(body.substr(0, eq));
    if (!seen.insert(key).second) throw Error(ErrorCode::ConfigError, where + ": repeated key '" + key + "'");
    try {
      field(key).set(cfg, body.substr(eq + 1));
    } catch (const Error& e) {
      throw Error(ErrorCode::ConfigError, where + ": " + e.what());
    }
  }
}

void apply_override(ExperimentConfig& cfg, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos) throw Error(ErrorCode::ConfigError, "override '" + assignment + "' needs key=value");
  field(trim(assignment.substr(0, eq))).set(cfg, assignment.substr(eq + 1));
}

void validate_config(const ExperimentConfig& c) {
  auto require = [](bool ok, const std::string& msg) {
    if (!ok) throw Error(ErrorCode::ConfigError, msg);
  };
  require(!c.potential.empty(), "potential must have at least one coefficient");
  require(c.beta >= 1.0, "beta must be >= 1");
  require(c.a > -1.0, "a must be > -1");
  require(!c.sizes.empty(), "sizes must not be empty");
  require(std::is_sorted(c.sizes.begin(), c.sizes.end()) &&
              std::adjacent_find(c.sizes.begin(), c.sizes.end()) == c.sizes.end(),
          "sizes must be strictly ascending");
  require(c.sizes.front() >= 2, "sizes must be >= 2");
  require(c.k >= 1 && c.k <= 20, "k must lie in [1, 20]");
  require(c.sampler == "auto" || c.sampler == "exact" || c.sampler == "mcmc", "sampler must be auto, exact or mcmc");
  require(c.chains >= 1, "chains must be >= 1");
  require(c.sbo_eps > 0.0 && c.sbo_eps < 0.01, "sbo_eps must lie in (0, 0.01)");
  require(c.sbo_cells >= 8, "sbo_cells must be >= 8");
  require(c.control_alpha > 0.0 && c.control_alpha < 1.0, "control_alpha must lie in (0, 1)");
  require(c.ks_threshold > 0.0 && c.ks_threshold <= 1.0, "ks_threshold must lie in (0, 1]");
  require(c.mean_s > 0.0 && c.mean_s < c.mean_t && c.mean_t <= 1.0, "need 0 < mean_s < mean_t <= 1");
  require(c.var_block_start > 0.0 && c.var_block_start < 1.0, "var_block_start must lie in (0, 1)");
  require(!c.clt_times.empty() && std::is_sorted(c.clt_times.begin(), c.clt_times.end()), "clt_times must be ascending");
  for (double t : c.clt_times) require(t > 0.0 && t < 1.0, "clt_times must lie in (0, 1)");
  require(c.bootstrap_resamples >= 10, "bootstrap_resamples must be >= 10");
}

std::string canonical_text(const ExperimentConfig& cfg) {
  std::string out;
  for (const auto& [name, f] : fields()) out += name + " = " + f.get(cfg) + "\n";
  return out;
}

std::uint64_t config_hash(const ExperimentConfig& cfg) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : canonical_text(cfg)) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

}  // namespace hardedge
