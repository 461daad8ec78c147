#pragma once

#include <cstdint>
#include <iosfwd>
#include <random>
#include <span>
#include <vector>

#include "hardedge/hamiltonian.hpp"

namespace hardedge {

using Rng = std::mt19937_64;

/// Per-replica seed: splitmix64 finaliser applied to master + mix(index ^ constant).
/// For a fixed index it is a bijection of the master seed, and for a fixed master distinct
/// indices give distinct seeds.
std::uint64_t derive_stream_seed(std::uint64_t master_seed, std::uint64_t replica_index);

/// chi_r variate, sqrt(2 Gamma(r/2, 1)).
double chi_variate(double r, Rng& rng);

struct Provenance {
  enum class Kind { ExactChi, Mcmc };
  Kind kind = Kind::ExactChi;
  std::uint64_t seed = 0;
  // MCMC only
  double step_size = 0.0;
  double acceptance = 0.0;
  std::uint64_t step = 0;
};

struct BidiagonalSample {
  std::vector<double> x;
  std::vector<double> y;
  Provenance provenance;
};

/// X_i ~ chi_{beta(i+a)} / sqrt(n beta), Y_i ~ chi_{beta i} / sqrt(n beta).
/// Requires the potential to be exactly V(x) = x/2.
BidiagonalSample sample_laguerre_exact(const HamiltonianParams& p, Rng& rng, std::uint64_t seed = 0);

struct ChainConfig {
  std::uint64_t burn_in = 0;   // 0 selects 50 n
  std::uint64_t thin = 0;      // 0 selects max(1, n / 10)
  double step_size = 0.0;      // initial scalar step; 0 selects (2n-1)^(-1/6)
  double target_accept = 0.574;
  std::uint64_t seed = 0;
};

struct ChainDiagnostics {
  double step_size = 0.0;
  double burn_in_acceptance = 0.0;  // over the last quarter of burn-in
  double acceptance = 0.0;          // over the sampling phase
  std::uint64_t orthant_rejections = 0;
  std::uint64_t steps = 0;
};

/// Metropolis-adjusted Langevin chain for the density proportional to exp(-n beta H) on the
/// positive orthant, preconditioned by the Hessian diagonal at the starting point.
class MalaChain {
 public:
  MalaChain(HamiltonianParams params, const ChainConfig& cfg);

  /// Runs burn-in with Robbins-Monro step adaptation, then freezes the step.
  /// Throws AdaptationFailure when the late burn-in acceptance leaves [0.05, 0.95].
  void burn_in();
  /// Advances `thin` steps and returns the state.
  BidiagonalSample next();

  /// log of the Metropolis-Hastings ratio for moving from `from` to `to` (interleaved).
  double log_acceptance_ratio(std::span<const double> from, std::span<const double> to) const;

  const ChainDiagnostics& diagnostics() const noexcept { return diag_; }
  std::span<const double> preconditioner() const noexcept { return precond_; }
  std::span<const double> state() const noexcept { return z_; }
  const ChainConfig& config() const noexcept { return cfg_; }

 private:
  bool step(bool adapt, std::uint64_t adapt_index);
  double energy(std::span<const double> z, std::span<double> grad) const;  // n beta H
  double log_proposal(std::span<const double> from, std::span<const double> grad_from,
                      std::span<const double> to) const;

  HamiltonianParams params_;
  ChainConfig cfg_;
  Rng rng_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
  std::vector<double> precond_;
  std::vector<double> z_;
  std::vector<double> grad_;
  double u_ = 0.0;
  double eps_ = 0.0;
  bool burned_in_ = false;
  std::uint64_t accepted_ = 0;
  std::uint64_t proposed_ = 0;
  ChainDiagnostics diag_;
  // scratch
  std::vector<double> trial_;
  std::vector<double> trial_grad_;
};

/// One chain: burn-in, then n_samples states spaced `thin` steps apart.
std::vector<BidiagonalSample> sample_mcmc(const HamiltonianParams& p, const ChainConfig& cfg, std::size_t n_samples,
                                          ChainDiagnostics* diagnostics = nullptr);

// Sample frames. Binary layout, little-endian:
//   "HEBS", u32 version, u64 n, f64 beta, f64 a, u64 d, f64 g[d], u64 seed,
//   then per sample f64 x[n], f64 y[n-1] until end of stream.
struct SampleHeader {
  std::uint32_t version = 1;
  std::uint64_t n = 0;
  double beta = 0.0;
  double a = 0.0;
  std::vector<double> g;
  std::uint64_t seed = 0;
};

SampleHeader header_for(const HamiltonianParams& p, std::uint64_t seed);
void write_samples_binary(std::ostream& out, const SampleHeader& h, std::span<const BidiagonalSample> samples);
/// Throws FormatError on bad magic, unknown version or a truncated frame.
std::vector<BidiagonalSample> read_samples_binary(std::istream& in, SampleHeader* header = nullptr);
void write_samples_csv(std::ostream& out, const SampleHeader& h, std::span<const BidiagonalSample> samples);

}  // namespace hardedge
