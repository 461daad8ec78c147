#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "hardedge/bidiagonal.hpp"

namespace hardedge {

/// Polynomial potential V(x) = sum_m g_m x^m whose even extension x -> V(x^2) passed a
/// uniform-convexity check. Only validate_potential() can construct one.
class ValidatedPotential {
 public:
  std::size_t degree() const noexcept { return g_.size(); }
  std::span<const double> coefficients() const noexcept { return g_; }
  /// g_m for m = 1..degree().
  double coefficient(std::size_t m) const { return g_.at(m - 1); }
  double convexity_margin() const noexcept { return margin_; }
  double range_hi() const noexcept { return range_hi_; }

  /// True for V(x) = x/2, the classical Laguerre case.
  bool is_laguerre() const noexcept { return g_.size() == 1 && g_[0] == 0.5; }

 private:
  friend ValidatedPotential validate_potential(std::span<const double>, std::optional<double>);
  ValidatedPotential(std::vector<double> g, double margin, double range_hi)
      : g_(std::move(g)), margin_(margin), range_hi_(range_hi) {}

  std::vector<double> g_;
  double margin_;
  double range_hi_;
};

/// Certifies uniform convexity of x -> V(x^2) on a 10^4-point grid of [0, range_hi].
/// The default range is 2 (phi(1) + 1). Trailing zero coefficients are dropped.
ValidatedPotential validate_potential(std::span<const double> g,
                                      std::optional<double> range_hi = std::nullopt);

/// Second derivative of x -> V(x^2).
double even_second_derivative(std::span<const double> g, double x);

struct PhiDerivatives {
  double first;
  double second;
};

struct FineCorrection {
  double x1;
  double y1;
};

/// Deterministic scaling functions of a potential: the coarse minimizer phi, the time change
/// theta with its normalizing constant kappa, and the first-order corrections x1, y1.
///
/// phi(t) is the positive root of t = sum_m m C(2m,m) g_m phi^{2m}. The integral
/// I(t) = int_0^t du / phi(u) is evaluated after the substitution u = v^2, which removes the
/// u^{-1/2} endpoint singularity; theta(t) = kappa I(t)^2 with kappa = I(1)^{-2}.
///
/// All members are const and thread-safe.
class ScalingFunctions {
 public:
  explicit ScalingFunctions(ValidatedPotential potential);

  const ValidatedPotential& potential() const noexcept { return potential_; }
  double kappa() const noexcept { return kappa_; }
  /// Hard-edge scaling constant c with c n^2 lambda_k -> Lambda_k.
  ///
  /// The time change gives Kbar(theta(s), theta(t)) sqrt(theta'(s) theta'(t)) = 2 sqrt(kappa) K(s, t),
  /// so spec(Kbar^T Kbar) = 4 kappa spec(K^T K) and c = 1 / (4 kappa). It equals 1 for V = x/2 and
  /// scales like g when the potential is multiplied by g, as it must.
  double hard_edge_constant() const noexcept { return 0.25 / kappa_; }

  double phi(double t) const;
  PhiDerivatives phi_derivs(double t) const;
  /// int_0^t du / phi(u).
  double inverse_phi_integral(double t) const;
  /// The same integral at increasing points, accumulated panel by panel.
  std::vector<double> inverse_phi_integrals(std::span<const double> increasing_t) const;
  double theta(double t) const;
  double theta_prime(double t) const;

  FineCorrection fine_correction(double beta, double a, double t) const;

  /// Right side of the defining equation, sum_m m C(2m,m) g_m phi^{2m}.
  double phi_equation(double phi_value) const;

 private:
  ValidatedPotential potential_;
  std::vector<double> root_coeffs_;  // m C(2m,m) g_m, as a polynomial in phi^2
  double kappa_ = 0.0;
};

/// phi(i/n) + x1(i/n)/n and phi(i/n) + y1(i/n)/n, floored at phi(i/n)/2.
Bidiagonal fine_minimizer(const ScalingFunctions& sf, double beta, double a, std::size_t n);

}  // namespace hardedge
