#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "hardedge/band.hpp"
#include "hardedge/bidiagonal.hpp"
#include "hardedge/potential.hpp"

namespace hardedge {

/// Parameters of H(x, y) = tr V(BB^T) - sum_k c_x(k) log x_k - sum_k c_y(k) log y_k with
/// c_x(k) = (k + a - 1/beta)/n and c_y(k) = (k - 1/beta)/n.
struct HamiltonianParams {
  ValidatedPotential potential;
  double beta = 2.0;
  double a = 0.0;
  std::size_t n = 1;
};

/// Throws InvalidParameters unless beta >= 1, a > -1 and n >= 1.
void check_params(const HamiltonianParams& p);

double log_coefficient_x(const HamiltonianParams& p, std::size_t k);  // k is 1-based
double log_coefficient_y(const HamiltonianParams& p, std::size_t k);

/// Symmetric Hessian in interleaved ordering, half-bandwidth 2d.
using BandedHessian = BandedSymmetric;

struct MinimizerResult {
  std::vector<double> x;
  std::vector<double> y;
  double grad_norm = 0.0;
  int iterations = 0;
  /// Coordinates fixed at 0 because their log coefficient vanishes (beta(1+a) = 1 or beta = 1).
  std::size_t pinned = 0;
};

/// Coordinates x_i, y_i with first <= i <= last (1-based) are free; everything else is frozen at
/// `background`. Only the d sites on either side of I actually couple to I.
struct ConditionalSpec {
  std::size_t first = 1;
  std::size_t last = 1;
  Bidiagonal background;
};

// Entries must be positive; an entry may be 0 only where its log coefficient is exactly 0.
double trace_V(const HamiltonianParams& p, std::span<const double> x, std::span<const double> y);
double hamiltonian(const HamiltonianParams& p, std::span<const double> x, std::span<const double> y);
std::vector<double> grad_trace_V(const HamiltonianParams& p, std::span<const double> x, std::span<const double> y);
/// Interleaved gradient of H, length 2n - 1.
std::vector<double> grad_hamiltonian(const HamiltonianParams& p, std::span<const double> x,
                                     std::span<const double> y);
BandedHessian hessian_hamiltonian(const HamiltonianParams& p, std::span<const double> x,
                                  std::span<const double> y);

/// H and its interleaved gradient in one pass, for samplers. Entries of z must be positive
/// (zero only where the log coefficient is zero); not checked.
double energy_and_gradient(const HamiltonianParams& p, std::span<const double> z, std::span<double> grad);

MinimizerResult minimize(const HamiltonianParams& p, const std::optional<Bidiagonal>& init = std::nullopt);
/// Full-length arrays; entries outside I keep their background values.
MinimizerResult conditional_minimize(const HamiltonianParams& p, const ConditionalSpec& spec);

/// Coarse Hamiltonian on K periodic sites with every log coefficient equal to t:
/// tr V(CC^T) - t sum (log x_k + log y_k), C the circulant bidiagonal. Returns the dense
/// 2K x 2K Hessian (row-major) at the constant point x = y = value.
std::vector<double> coarse_circulant_hessian(const ValidatedPotential& v, double t, double value, std::size_t sites);

struct LatticeCoefficients {
  std::int64_t a;
  std::int64_t b;
  std::int64_t c;
  std::int64_t d;
  bool operator==(const LatticeCoefficients&) const = default;
};

/// Closed forms A = m C(2m,m), B = (2m^2-2m+1)/(2m-1) A, C = (2m^2-2m)/(2m-1) A,
/// D = -(m^2-m)/(2m-1) A in checked 64-bit arithmetic.
LatticeCoefficients lattice_coefficients(int m);

/// Same numbers by brute-force path enumeration; m <= 6.
///
/// A path is a closed walk of 2m steps. Odd steps go right or down, even steps go right or up,
/// and it may start at any height. Only paths with r > 0 right-steps at height 0 contribute;
/// each is weighted by r. B uses (#right - 1), C uses the number of diagonal steps, and D the
/// sum of index offsets (h for a right step at h, h-1 for a down step from h, h for an up step
/// from h).
LatticeCoefficients lattice_enumerate(int m);

/// Number of paths starting at height 0 with a right step; equals sum_l C(m-1,l) C(m,l).
std::int64_t rooted_path_count(int m);

/// d tr V(BB^T) / dx_i by direct path summation; 1-based bulk index d < i < n - d, d <= 4.
double grad_via_paths(const HamiltonianParams& p, std::span<const double> x, std::span<const double> y,
                      std::size_t i);

}  // namespace hardedge
