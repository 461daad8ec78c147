#include "hardedge/potential.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "hardedge/error.hpp"
#include "hardedge/quadrature.hpp"

namespace hardedge {

namespace {

constexpr std::size_t kConvexityGrid = 10000;
// Geometric panels for int_0^{sqrt t} 2v / phi(v^2) dv, finest panel next to 0.
constexpr int kGeometricPanels = 10;
constexpr double kQuadratureTolerance = 1e-10;

double central_binomial(std::size_t m) {
  double c = 1.0;
  for (std::size_t j = 1; j <= m; ++j) c = c * static_cast<double>(m + j) / static_cast<double>(j);
  return c;
}

std::vector<double> root_coefficients(std::span<const double> g) {
  std::vector<double> c(g.size());
  for (std::size_t m = 1; m <= g.size(); ++m) c[m - 1] = static_cast<double>(m) * central_binomial(m) * g[m - 1];
  return c;
}

// F(s) = sum_m c_m s^m and F'(s).
std::pair<double, double> eval_in_square(std::span<const double> c, double s) {
  double f = 0.0;
  double df = 0.0;
  for (std::size_t m = c.size(); m >= 1; --m) {
    df = df * s + f;
    f = f * s + c[m - 1];
  }
  return {f * s, df * s + f};
}

// Solves F(s) = t for s = phi^2 >= 0 by safeguarded Newton on a doubling bracket.
double solve_phi_square(std::span<const double> c, double t) {
  if (t == 0.0) return 0.0;
  double lo = 0.0;
  double hi = c[0] > 0.0 ? t / c[0] : 1.0;
  for (int k = 0; k < 200 && eval_in_square(c, hi).first < t; ++k) hi *= 2.0;
  double s = 0.5 * (lo + hi);
  for (int iter = 0; iter < 200; ++iter) {
    const auto [f, df] = eval_in_square(c, s);
    const double r = f - t;
    if (r == 0.0) return s;
    if (r < 0.0) lo = s; else hi = s;
    double next = s - r / df;
    if (!(df > 0.0) || next <= lo || next >= hi) next = 0.5 * (lo + hi);
    if (std::abs(next - s) <= 1e-16 * s || hi - lo <= 1e-16 * hi) return next;
    s = next;
  }
  return s;
}

}  // namespace

double even_second_derivative(std::span<const double> g, double x) {
  double sum = 0.0;
  for (std::size_t m = 1; m <= g.size(); ++m) {
    const double mm = static_cast<double>(m);
    sum += g[m - 1] * 2.0 * mm * (2.0 * mm - 1.0) * std::pow(x, 2.0 * mm - 2.0);
  }
  return sum;
}

ValidatedPotential validate_potential(std::span<const double> g_in, std::optional<double> range_hi) {
  if (g_in.empty()) throw Error(ErrorCode::EmptyPotential, "potential has no coefficients");
  std::vector<double> g(g_in.begin(), g_in.end());
  for (double v : g) {
    if (!std::isfinite(v)) throw Error(ErrorCode::NotUniformlyConvex, "non-finite coefficient");
  }
  while (g.size() > 1 && g.back() == 0.0) g.pop_back();
  if (!(g[0] > 0.0)) throw Error(ErrorCode::NotUniformlyConvex, "g_1 must be positive");
  if (!(g.back() > 0.0)) {
    throw Error(ErrorCode::NotUniformlyConvex, "leading coefficient must be positive for convexity at infinity");
  }

  double hi = 0.0;
  if (range_hi) {
    if (!(*range_hi > 0.0)) throw Error(ErrorCode::OutOfDomain, "range_hi must be positive");
    hi = *range_hi;
  } else {
    const auto c = root_coefficients(g);
    hi = 2.0 * (std::sqrt(solve_phi_square(c, 1.0)) + 1.0);
  }

  double margin = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k <= kConvexityGrid; ++k) {
    const double x = hi * static_cast<double>(k) / static_cast<double>(kConvexityGrid);
    margin = std::min(margin, even_second_derivative(g, x));
  }
  if (!(margin > 0.0)) {
    throw Error(ErrorCode::NotUniformlyConvex,
                "d^2/dx^2 V(x^2) reaches " + std::to_string(margin) + " on [0, " + std::to_string(hi) + "]");
  }
  return ValidatedPotential(std::move(g), margin, hi);
}

ScalingFunctions::ScalingFunctions(ValidatedPotential potential)
    : potential_(std::move(potential)), root_coeffs_(root_coefficients(potential_.coefficients())) {
  const double total = inverse_phi_integral(1.0);
  kappa_ = 1.0 / (total * total);
}

double ScalingFunctions::phi_equation(double phi_value) const {
  return eval_in_square(root_coeffs_, phi_value * phi_value).first;
}

double ScalingFunctions::phi(double t) const {
  if (!(t >= 0.0 && t <= 1.0)) throw Error(ErrorCode::OutOfDomain, "phi(t) requires t in [0,1], got " + std::to_string(t));
  return std::sqrt(solve_phi_square(root_coeffs_, t));
}

PhiDerivatives ScalingFunctions::phi_derivs(double t) const {
  if (!(t > 0.0 && t <= 1.0)) throw Error(ErrorCode::OutOfDomain, "phi derivatives require t in (0,1]");
  const double p = phi(t);
  // F(phi) = sum c_m phi^{2m}; phi' = 1/F'(phi), phi'' = -F''(phi) phi'^3.
  double d1 = 0.0;
  double d2 = 0.0;
  for (std::size_t m = 1; m <= root_coeffs_.size(); ++m) {
    const double mm = static_cast<double>(m);
    d1 += root_coeffs_[m - 1] * 2.0 * mm * std::pow(p, 2.0 * mm - 1.0);
    d2 += root_coeffs_[m - 1] * 2.0 * mm * (2.0 * mm - 1.0) * std::pow(p, 2.0 * mm - 2.0);
  }
  const double first = 1.0 / d1;
  return {first, -d2 * first * first * first};
}

double ScalingFunctions::inverse_phi_integral(double t) const {
  if (!(t >= 0.0 && t <= 1.0)) throw Error(ErrorCode::OutOfDomain, "integral requires t in [0,1]");
  if (t == 0.0) return 0.0;
  // u = v^2: int_0^t du/phi(u) = int_0^{sqrt t} 2v/phi(v^2) dv, bounded integrand.
  auto integrand = [this](double v) { return 2.0 * v / std::sqrt(solve_phi_square(root_coeffs_, v * v)); };
  const double top = std::sqrt(t);
  double fine = 0.0;
  double coarse = 0.0;
  double hi = top;
  for (int p = 0; p <= kGeometricPanels; ++p) {
    const double lo = p == kGeometricPanels ? 0.0 : 0.5 * hi;
    fine += integrate_panel(gauss_legendre_64(), integrand, lo, hi);
    coarse += integrate_panel(gauss_legendre_32(), integrand, lo, hi);
    hi = lo;
  }
  if (!(std::abs(fine - coarse) <= kQuadratureTolerance * std::max(1.0, std::abs(fine)))) {
    throw Error(ErrorCode::QuadratureFailure, "quadrature error estimate " + std::to_string(std::abs(fine - coarse)));
  }
  return fine;
}

std::vector<double> ScalingFunctions::inverse_phi_integrals(std::span<const double> ts) const {
  std::vector<double> out(ts.size());
  double prev_t = 0.0;
  double acc = 0.0;
  for (std::size_t k = 0; k < ts.size(); ++k) {
    const double t = ts[k];
    if (!(t >= prev_t && t <= 1.0)) throw Error(ErrorCode::OutOfDomain, "integral points must increase within [0,1]");
    if (t > 0.0 && prev_t < 0.5 * t) {
      // Too close to the singular endpoint for a single panel; restart from 0.
      acc = inverse_phi_integral(t);
    } else if (t > prev_t) {
      // 1/phi is analytic on a neighbourhood at least 3 half-widths wide.
      auto integrand = [this](double u) { return 1.0 / std::sqrt(solve_phi_square(root_coeffs_, u)); };
      const double fine = integrate_panel(gauss_legendre_32(), integrand, prev_t, t);
      const double coarse = integrate_panel(gauss_legendre_16(), integrand, prev_t, t);
      if (!(std::abs(fine - coarse) <= kQuadratureTolerance * std::max(1.0, std::abs(fine)))) {
        acc = inverse_phi_integral(t);
      } else {
        acc += fine;
      }
    }
    out[k] = acc;
    prev_t = t;
  }
  return out;
}

double ScalingFunctions::theta(double t) const {
  if (t == 1.0) return 1.0;
  const double integral = inverse_phi_integral(t);
  return kappa_ * integral * integral;
}

double ScalingFunctions::theta_prime(double t) const {
  if (!(t > 0.0 && t <= 1.0)) throw Error(ErrorCode::OutOfDomain, "theta' requires t in (0,1]");
  return 2.0 * kappa_ * inverse_phi_integral(t) / phi(t);
}

FineCorrection ScalingFunctions::fine_correction(double beta, double a, double t) const {
  if (!(t > 0.0 && t <= 1.0)) throw Error(ErrorCode::OutOfDomain, "fine correction requires t in (0,1]");
  const double dphi = phi_derivs(t).first;
  const double difference = (a + 0.5) / inverse_phi_integral(t) - 0.5 * dphi;
  const double sum = (a - 2.0 / beta) * dphi;
  return {0.5 * (sum + difference), 0.5 * (sum - difference)};
}

Bidiagonal fine_minimizer(const ScalingFunctions& sf, double beta, double a, std::size_t n) {
  if (n < 2) throw Error(ErrorCode::InvalidParameters, "fine minimizer needs n >= 2");
  Bidiagonal out;
  out.x.resize(n);
  out.y.resize(n - 1);
  const double nn = static_cast<double>(n);
  std::vector<double> ts(n);
  for (std::size_t i = 1; i <= n; ++i) ts[i - 1] = static_cast<double>(i) / nn;
  const auto integrals = sf.inverse_phi_integrals(ts);
  for (std::size_t i = 1; i <= n; ++i) {
    const double t = ts[i - 1];
    const double p = sf.phi(t);
    const double dphi = sf.phi_derivs(t).first;
    const double difference = (a + 0.5) / integrals[i - 1] - 0.5 * dphi;
    const double sum = (a - 2.0 / beta) * dphi;
    const double x1 = 0.5 * (sum + difference);
    const double y1 = 0.5 * (sum - difference);
    out.x[i - 1] = std::max(p + x1 / nn, 0.5 * p);
    if (i < n) out.y[i - 1] = std::max(p + y1 / nn, 0.5 * p);
  }
  return out;
}

}  // namespace hardedge
