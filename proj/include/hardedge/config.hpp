#pragma once

#include <cstdint>
#include <istream>
#include <string>
#include <utility>
#include <vector>

namespace hardedge {

/// Flat experiment configuration. File grammar, one entry per line:
///
///   key = value        # comment
///   potential = [0.5, 0.125]
///   experiment = universality
///
/// Values are numbers, bracketed comma-separated arrays, or strings (bare or double-quoted).
/// Unknown keys, repeated keys and malformed values raise ConfigError.
struct ExperimentConfig {
  std::string experiment = "universality";
  // ensemble
  std::vector<double> potential{0.5};
  std::vector<double> compare_potential;  // second ensemble for universality; empty for none
  double beta = 2.0;
  double a = 0.0;
  std::vector<std::size_t> sizes{400};
  std::size_t replicas = 2000;
  int k = 1;
  // sampling
  std::string sampler = "auto";  // auto, exact or mcmc
  std::size_t chains = 8;
  std::uint64_t thin = 0;     // 0: sampler default
  std::uint64_t burn_in = 0;  // 0: sampler default
  // SBO target
  std::size_t sbo_cells = 2000;
  double sbo_eps = 1e-6;
  std::size_t sbo_replicas = 2000;  // 0 disables the SBO target
  std::size_t sbo_self_checks = 5;
  double sbo_grid_tolerance = 0.01;
  // thresholds
  double ks_threshold = 0.06;
  double control_alpha = 0.05;
  std::size_t bootstrap_resamples = 200;
  double mean_s = 0.2;
  double mean_t = 0.8;
  double mean_min_order = 0.5;
  double var_block_start = 0.5;
  double var_ratio_low = 0.85;
  double var_ratio_high = 1.15;
  bool var_beta_scaling = false;
  double var_beta_tolerance = 0.2;
  std::vector<double> clt_times{0.2, 0.5, 0.8};
  double clt_var_tolerance = 0.10;
  double clt_ks_threshold = 0.05;
  double clt_mean_tolerance = 0.05;
  double clt_cov_tolerance = 0.15;
  double clt_increment_corr = 0.10;
  double clt_endpoint_var = 0.01;
  double phi_tolerance = 0.02;
  // run
  std::uint64_t master_seed = 1;
  std::string output_dir;  // empty: no files
};

/// Parses `key = value` lines into `cfg`; keys not present keep their current values.
void apply_config_text(ExperimentConfig& cfg, std::istream& in, const std::string& source = "config");
/// Applies one `key=value` override.
void apply_override(ExperimentConfig& cfg, const std::string& assignment);
/// Range and consistency checks; throws ConfigError.
void validate_config(const ExperimentConfig& cfg);

/// Canonical `key = value` text, one line per key in a fixed order; parses back to the same config.
std::string canonical_text(const ExperimentConfig& cfg);
/// FNV-1a 64 of canonical_text().
std::uint64_t config_hash(const ExperimentConfig& cfg);
std::string hex64(std::uint64_t v);

}  // namespace hardedge
