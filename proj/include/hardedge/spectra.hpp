#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hardedge/potential.hpp"
#include "hardedge/sampler.hpp"

namespace hardedge {

/// Upper-triangular kernel with entries (i, j), i <= j:
///   K(i, j) = (1 / X_j) prod_{k=i}^{j-1} Y_k / X_k = exp(p_j - p_i - log X_j),
/// p_j = sum_{k<j} (log Y_k - log X_k). Up to a diagonal sign similarity this is B^{-T}, so the
/// spectrum of K^T K is that of (B B^T)^{-1}.
class InverseKernelState {
 public:
  /// Throws NonFinite unless every X is positive and finite and every Y is finite and >= 0.
  InverseKernelState(std::span<const double> x, std::span<const double> y);
  explicit InverseKernelState(const BidiagonalSample& s) : InverseKernelState(s.x, s.y) {}

  std::size_t size() const noexcept { return inv_x_.size(); }
  /// p_j; -inf after a zero Y.
  const std::vector<double>& log_prefix() const noexcept { return log_prefix_; }
  /// Dense entry, for oracles.
  double entry(std::size_t i, std::size_t j) const;

  /// K v or K^T v in O(n).
  ///
  /// Uses the one-step recurrences S_i = v_i / X_i + (Y_i / X_i) S_{i+1} (forward) and
  /// R_j = v_j + (Y_{j-1} / X_{j-1}) R_{j-1} (transpose), so exp(p) is never formed and each
  /// running sum is rescaled by a single ratio per step. Throws NonFinite on non-finite input.
  void apply(std::span<const double> v, std::span<double> out, bool transpose) const;

 private:
  std::vector<double> inv_x_;
  std::vector<double> ratio_;  // Y_k / X_k
  std::vector<double> log_prefix_;
  std::vector<double> log_x_;
};

std::vector<double> kernel_apply(const InverseKernelState& state, std::span<const double> v, bool transpose);

struct SpectrumResult {
  std::vector<double> values;     // ascending
  double rescale_factor = 1.0;    // 1 for raw values
  bool rescaled = false;
  int iterations = 0;             // matrix-vector products or bisection steps
  std::vector<double> residuals;  // relative, per value, when the solver has them
  std::vector<std::string> warnings;
};

/// Top-k eigenpairs of a symmetric positive semi-definite operator by thick-restart Lanczos with
/// full reorthogonalization. Basis size min(dim, max(4k, 16)); converged when every Ritz residual
/// is <= rtol * value. Operators of dimension <= 64 are assembled and solved densely.
struct TopEigs {
  std::vector<double> values;  // descending
  std::vector<double> residuals;  // ||A u - mu u|| / mu
  int matvecs = 0;
};
using SymmetricOperator = std::function<void(std::span<const double>, std::span<double>)>;
TopEigs top_eigenvalues(std::size_t dim, const SymmetricOperator& apply, int k, double rtol = 1e-8,
                        int max_matvecs = 500, std::uint64_t seed = 0x5eed);

/// The k smallest eigenvalues of B B^T as 1/mu from the k largest mu of K^T K. 1 <= k <= 20.
SpectrumResult smallest_eigs(const BidiagonalSample& sample, int k);

/// The k smallest eigenvalues of the explicitly formed tridiagonal B B^T by Sturm-count bisection
/// to relative 1e-10. n <= 1e4 (TooLarge otherwise).
SpectrumResult sturm_eigs(const BidiagonalSample& sample, int k);
/// Number of eigenvalues of B B^T below `shift`.
std::size_t sturm_count(const BidiagonalSample& sample, double shift);

/// Multiplies by n^2 / (4 kappa), the hard-edge constant times n^2. Throws DoubleRescale when the
/// result is already rescaled.
SpectrumResult rescale_hard_edge(const SpectrumResult& raw, double kappa, std::size_t n);

// ---------------------------------------------------------------------------------------------
// Stochastic Bessel operator through its inverse kernel.

enum class SboMode { Native, General };

/// Cells partition [eps, 1]: M/4 geometric cells on [eps, 0.01], the rest uniform on [0.01, 1].
/// Nodes are cell midpoints and weights cell widths.
struct SboGrid {
  std::vector<double> nodes;
  std::vector<double> weights;
  double eps = 1e-6;
  double beta = 2.0;
  double a = 0.0;
  SboMode mode = SboMode::Native;
};

SboGrid make_sbo_grid(std::size_t cells, double eps, double beta, double a, SboMode mode);

/// W(t) = int_t^1 db_u / sqrt(u) at the given times in (0, 1] (unit variance scale, any order).
std::vector<double> sample_log_field(std::span<const double> times, Rng& rng);

/// Discretized kernel M_ij = kernel(s_i, s_j) sqrt(w_i w_j) for i < j, with the diagonal cell
/// weighted by 1/2. Native kernel: (1/sqrt t)(s/t)^{a/2} exp[(W(s) - W(t))/sqrt(beta)]. General
/// kernel: (phi(s) phi(t))^{-1/2} (theta(s)/theta(t))^{a/2+1/4} exp[(W(theta s) - W(theta t))/sqrt(beta)].
class SboModel {
 public:
  /// General mode needs the scaling functions; native mode ignores them.
  explicit SboModel(SboGrid grid, const ScalingFunctions* sf = nullptr);

  const SboGrid& grid() const noexcept { return grid_; }
  /// Times at which the field enters: the nodes, or theta(nodes) in general mode.
  const std::vector<double>& noise_times() const noexcept { return times_; }

  /// Lambda_1..Lambda_k = 1 / sigma^2 for the k largest singular values of M. `field` holds W at
  /// noise_times(); an all-zero field gives the deterministic operator.
  SpectrumResult spectrum(std::span<const double> field, int k) const;
  SpectrumResult draw(Rng& rng, int k) const;

  /// sum_{i<j} M_ij^2.
  double strict_hs_norm_squared(std::span<const double> field) const;

 private:
  void log_factors(std::span<const double> field, std::vector<double>& lu, std::vector<double>& lv) const;

  SboGrid grid_;
  std::vector<double> times_;
  std::vector<double> base_u_;
  std::vector<double> base_v_;
};

/// Simulates one field on the union of both models' noise times and returns W at each model's
/// times, so both kernels see the same Brownian path.
std::pair<std::vector<double>, std::vector<double>> coupled_fields(const SboModel& first, const SboModel& second,
                                                                   Rng& rng);

/// Relative change of Lambda_1 when the grid is doubled, on a coupled field. Throws GridTooCoarse
/// when it exceeds `tolerance`.
double sbo_self_check(const SboModel& coarse, const ScalingFunctions* sf, Rng& rng, double tolerance = 0.01);

// CSV rows: replica_seed, n_or_M, rescale_factor, lambda_1..lambda_k, after a '#' header line.
struct SpectrumRow {
  std::uint64_t seed = 0;
  std::size_t size = 0;
  SpectrumResult result;
};
void write_spectra_csv(std::ostream& out, const std::string& header, std::span<const SpectrumRow> rows);

}  // namespace hardedge
