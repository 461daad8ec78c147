#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hardedge/config.hpp"
#include "hardedge/sampler.hpp"
#include "hardedge/spectra.hpp"
#include "hardedge/stats.hpp"
#include "json.hpp"

namespace hardedge {

inline constexpr int kFormatVersion = 1;
inline constexpr const char* kVersion = "1.0.0";

using Json = nlohmann::ordered_json;

struct SamplingPlan {
  enum class Kind { Exact, Mcmc };
  Kind kind = Kind::Exact;
  std::size_t chains = 8;
  std::uint64_t thin = 0;
  std::uint64_t burn_in = 0;
};

/// Exact chi sampling for V = x/2 under sampler=auto, MALA otherwise.
SamplingPlan plan_for(const ExperimentConfig& cfg, const ValidatedPotential& potential);

/// `replicas` draws. Exact: replica i uses derive_stream_seed(seed, i). MCMC: `chains` chains
/// with seeds derive_stream_seed(seed, c) each contribute a contiguous block of thinned states.
std::vector<BidiagonalSample> draw_samples(const HamiltonianParams& p, std::size_t replicas, const SamplingPlan& plan,
                                           std::uint64_t seed);

/// Raw k smallest eigenvalues of each sample.
std::vector<SpectrumResult> model_spectra(const std::vector<BidiagonalSample>& samples, int k);

/// Replica i draws its field from derive_stream_seed(seed, i).
std::vector<SpectrumResult> sbo_spectra(const SboModel& model, std::size_t replicas, int k, std::uint64_t seed);

struct ComparisonEntry {
  std::string first;
  std::string second;
  std::size_t n = 0;
  int index = 1;  // eigenvalue label, 1-based
  double ks = 0.0;
  std::size_t first_count = 0;
  std::size_t second_count = 0;
  Band band;
  double threshold = 0.0;
  bool pass = false;
};

struct ControlEntry {
  std::string source;
  std::size_t n = 0;
  int index = 1;
  double ks = 0.0;
  double critical = 0.0;  // Bonferroni-adjusted
  bool pass = false;
};

struct SourceSummary {
  std::string name;
  std::size_t n = 0;  // 0 for the SBO target
  std::uint64_t seed = 0;
  double rescale_factor = 1.0;
  std::vector<double> means;  // per eigenvalue index
  std::size_t count = 0;
};

struct ComparisonReport {
  std::vector<SourceSummary> sources;
  std::vector<ComparisonEntry> entries;
  std::vector<ControlEntry> controls;
  double sbo_grid_change = 0.0;  // median relative change of Lambda_1 under grid doubling
  bool passed = false;
  bool controls_passed = false;
};

/// Rescaled model eigenvalues for each configured ensemble and size, the optional SBO target,
/// pairwise KS per eigenvalue index with bootstrap bands, and split-half controls.
/// Throws InsufficientReplicas below 100 replicas and ConfigError with fewer than two sources.
ComparisonReport run_universality(const ExperimentConfig& cfg);
Json to_json(const ComparisonReport& r);

/// Outcome of the deterministic and moment checks. `body` holds the measured values.
struct CheckReport {
  std::string experiment;
  bool passed = false;
  bool controls_passed = true;
  Json body;
};

/// Sum_{k=floor(ns)}^{floor(nt)-1} log(y_k / x_k) at the minimizer against
/// -(a/2 + 1/4) log(theta(t)/theta(s)) + (1/2) log(phi(t)/phi(s)), and its decay order in n.
CheckReport run_mean_check(const ExperimentConfig& cfg);
/// Block fluctuation variance against phi^2 theta'/theta |I| / (beta n), plus the circulant
/// eigenvalue identity and, optionally, the beta scaling.
CheckReport run_variance_check(const ExperimentConfig& cfg);
/// S(t) = sum_{k >= floor(nt)} log(X_k / x_k) - log(Y_k / y_k): mean, variance against
/// (1/beta) log(1/theta(t)), normality, covariance, increments, and X_{floor(nt)} against phi(t).
CheckReport run_clt_check(const ExperimentConfig& cfg);

/// Report envelope: format_version, experiment, config hash, seed, verdicts and body.
Json report_json(const ExperimentConfig& cfg, const std::string& experiment, bool passed, bool controls_passed,
                 Json body);
/// Run manifest: config hash and canonical text, seed, versions.
Json run_manifest(const ExperimentConfig& cfg);

}  // namespace hardedge
