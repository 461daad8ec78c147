#include "hardedge/hamiltonian.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "hardedge/dual.hpp"
#include "hardedge/error.hpp"

namespace hardedge {

namespace {

constexpr int kMaxNewtonIterations = 200;
constexpr int kMaxHalvings = 60;
constexpr double kGradientTolerance = 1e-10;
// A Newton step may shrink a coordinate to no less than 10% of its current value.
constexpr double kPositivityFraction = 0.9;

// Band matrix with half-width w; column of (i, off) is i + off, wrapped when periodic.
template <class S>
struct Band {
  std::size_t n = 0;
  std::size_t w = 0;
  bool periodic = false;
  std::vector<S> v;

  Band(std::size_t size, std::size_t width, bool wrap)
      : n(size), w(width), periodic(wrap), v(size * (2 * width + 1), S(0.0)) {}

  S& at(std::size_t i, long off) { return v[i * (2 * w + 1) + static_cast<std::size_t>(off + static_cast<long>(w))]; }
  S get(std::size_t i, long off) const {
    if (off < -static_cast<long>(w) || off > static_cast<long>(w)) return S(0.0);
    return v[i * (2 * w + 1) + static_cast<std::size_t>(off + static_cast<long>(w))];
  }
  // Resolves column index; false when it falls outside a non-periodic matrix.
  bool column(std::size_t i, long off, std::size_t& j) const {
    const long c = static_cast<long>(i) + off;
    const long nn = static_cast<long>(n);
    if (periodic) {
      j = static_cast<std::size_t>(((c % nn) + nn) % nn);
      return true;
    }
    if (c < 0 || c >= nn) return false;
    j = static_cast<std::size_t>(c);
    return true;
  }
};

template <class S>
struct TraceGradient {
  S trace{0.0};
  std::vector<S> gx;
  std::vector<S> gy;
};

// tr V(BB^T) and its gradient with respect to x and y. G = V'(T) is only needed on the diagonal
// and first superdiagonal: d tr V(T) = tr(G dT), and dT touches T_ii, T_{i,i+1} only.
template <class S>
TraceGradient<S> trace_and_gradient(std::span<const double> g, std::span<const S> x, std::span<const S> y,
                                    bool periodic, bool want_gradient) {
  const std::size_t n = x.size();
  const std::size_t d = g.size();
  const std::size_t ny = y.size();

  std::vector<S> diag(n);
  std::vector<S> upper(ny);  // T(i, i+1) = -x_i y_i, wrapped for i = n-1 when periodic
  for (std::size_t i = 0; i < n; ++i) {
    diag[i] = x[i] * x[i];
    if (i > 0) diag[i] += y[i - 1] * y[i - 1];
  }
  if (periodic) diag[0] += y[n - 1] * y[n - 1];
  for (std::size_t i = 0; i < ny; ++i) upper[i] = -(x[i] * y[i]);

  auto tri = [&](std::size_t k, long s) -> S {
    if (s == 0) return diag[k];
    if (s == 1) return k < ny ? upper[k] : S(0.0);
    const std::size_t km = k == 0 ? n - 1 : k - 1;
    if (k == 0 && !periodic) return S(0.0);
    return upper[km];
  };

  std::vector<S> g_diag(want_gradient ? n : 0, S(0.0));
  std::vector<S> g_upper(want_gradient ? ny : 0, S(0.0));

  Band<S> power(n, 0, periodic);
  for (std::size_t i = 0; i < n; ++i) power.at(i, 0) = S(1.0);

  TraceGradient<S> out;
  for (std::size_t m = 1; m <= d; ++m) {
    const double gm = g[m - 1];
    if (want_gradient && gm != 0.0) {
      const double weight = static_cast<double>(m) * gm;
      for (std::size_t i = 0; i < n; ++i) g_diag[i] += weight * power.get(i, 0);
      for (std::size_t i = 0; i < ny; ++i) g_upper[i] += weight * power.get(i, 1);
    }
    Band<S> next(n, power.w + 1, periodic);
    const long wn = static_cast<long>(next.w);
    const long wp = static_cast<long>(power.w);
    for (std::size_t i = 0; i < n; ++i) {
      for (long off = -wn; off <= wn; ++off) {
        S acc(0.0);
        for (long s = -1; s <= 1; ++s) {
          const long inner = off - s;
          if (inner < -wp || inner > wp) continue;
          std::size_t k = 0;
          if (!power.column(i, inner, k)) continue;
          std::size_t j = 0;
          if (!power.column(i, off, j)) continue;
          acc += power.get(i, inner) * tri(k, s);
        }
        next.at(i, off) = acc;
      }
    }
    power = std::move(next);
    if (gm != 0.0) {
      S tr(0.0);
      for (std::size_t i = 0; i < n; ++i) tr += power.get(i, 0);
      out.trace += gm * tr;
    }
  }

  if (want_gradient) {
    out.gx.assign(n, S(0.0));
    out.gy.assign(ny, S(0.0));
    for (std::size_t i = 0; i < n; ++i) {
      out.gx[i] = 2.0 * g_diag[i] * x[i];
      if (i < ny) out.gx[i] -= 2.0 * g_upper[i] * y[i];
    }
    for (std::size_t i = 0; i < ny; ++i) {
      const std::size_t next_site = (i + 1) % n;
      out.gy[i] = 2.0 * (g_diag[next_site] * y[i] - g_upper[i] * x[i]);
    }
  }
  return out;
}

void check_point(const HamiltonianParams& p, std::span<const double> x, std::span<const double> y) {
  if (x.size() != p.n || y.size() + 1 != p.n) {
    throw Error(ErrorCode::InvalidParameters, "expected arrays of length n and n-1");
  }
  for (std::size_t k = 1; k <= x.size(); ++k) {
    const double v = x[k - 1];
    if (!(v > 0.0) && !(v == 0.0 && log_coefficient_x(p, k) == 0.0)) {
      throw Error(ErrorCode::NonPositiveEntry, "x_" + std::to_string(k) + " = " + std::to_string(v));
    }
  }
  for (std::size_t k = 1; k <= y.size(); ++k) {
    const double v = y[k - 1];
    if (!(v > 0.0) && !(v == 0.0 && log_coefficient_y(p, k) == 0.0)) {
      throw Error(ErrorCode::NonPositiveEntry, "y_" + std::to_string(k) + " = " + std::to_string(v));
    }
  }
}

std::vector<double> slot_coefficients(const HamiltonianParams& p) {
  std::vector<double> c(2 * p.n - 1);
  for (std::size_t i = 0; i < p.n; ++i) {
    c[x_slot(i)] = log_coefficient_x(p, i + 1);
    if (i + 1 < p.n) c[y_slot(i)] = log_coefficient_y(p, i + 1);
  }
  return c;
}

template <class S>
std::vector<S> interleaved_gradient(const HamiltonianParams& p, std::span<const S> z) {
  const std::size_t n = p.n;
  std::vector<S> x(n);
  std::vector<S> y(n - 1);
  for (std::size_t i = 0; i < n; ++i) {
    x[i] = z[x_slot(i)];
    if (i + 1 < n) y[i] = z[y_slot(i)];
  }
  const auto tg = trace_and_gradient<S>(p.potential.coefficients(), x, y, false, true);
  std::vector<S> grad(z.size());
  for (std::size_t i = 0; i < n; ++i) {
    const double cx = log_coefficient_x(p, i + 1);
    grad[x_slot(i)] = tg.gx[i];
    if (cx != 0.0) grad[x_slot(i)] -= cx / x[i];
    if (i + 1 < n) {
      const double cy = log_coefficient_y(p, i + 1);
      grad[y_slot(i)] = tg.gy[i];
      if (cy != 0.0) grad[y_slot(i)] -= cy / y[i];
    }
  }
  return grad;
}

// Hessian columns from dual-number gradients. Slots 2b+1 apart never share a row of the band,
// so one seeded evaluation per colour recovers all of them.
BandedHessian hessian_interleaved(const HamiltonianParams& p, std::span<const double> z) {
  const std::size_t nv = z.size();
  const std::size_t b = 2 * p.potential.degree();
  const std::size_t colours = std::min(nv, 2 * b + 1);
  BandedHessian h(nv, std::min(b, nv == 0 ? 0 : nv - 1));
  std::vector<Dual> zd(nv);
  for (std::size_t c = 0; c < colours; ++c) {
    for (std::size_t j = 0; j < nv; ++j) zd[j] = Dual(z[j], j % colours == c ? 1.0 : 0.0);
    const auto gd = interleaved_gradient<Dual>(p, zd);
    for (std::size_t r = 0; r < nv; ++r) {
      // the seeded slot within distance b of r, if any
      const std::size_t base = r >= b ? r - b : 0;
      std::size_t j = base + ((c + colours - base % colours) % colours);
      if (j < nv && j <= r + b && j <= r) h.at(r, j) = gd[r].d;
    }
  }
  return h;
}

double hamiltonian_interleaved(const HamiltonianParams& p, std::span<const double> z) {
  const auto b = deinterleave(z);
  return hamiltonian(p, b.x, b.y);
}

double norm2(std::span<const double> v) {
  double s = 0.0;
  for (double e : v) s += e * e;
  return std::sqrt(s);
}

// Damped Newton over the slots marked free; others stay put.
MinimizerResult newton(const HamiltonianParams& p, std::vector<double> z, const std::vector<char>& free) {
  const std::size_t nv = z.size();
  auto masked_gradient = [&](std::span<const double> at) {
    auto g = interleaved_gradient<double>(p, at);
    for (std::size_t j = 0; j < nv; ++j) {
      if (!free[j]) g[j] = 0.0;
    }
    return g;
  };

  MinimizerResult result;
  auto grad = masked_gradient(z);
  double energy = hamiltonian_interleaved(p, z);
  bool polished = false;
  for (int iter = 0;; ++iter) {
    const double gn = norm2(grad);
    const bool converged = gn <= kGradientTolerance * std::max(1.0, norm2(z));
    // One extra Newton step once converged squares the remaining error.
    if (converged && polished) {
      const auto b = deinterleave(z);
      result.x = b.x;
      result.y = b.y;
      result.grad_norm = gn;
      result.iterations = iter;
      return result;
    }
    if (iter == kMaxNewtonIterations && !converged) {
      throw Error(ErrorCode::NonConvergence, "Newton did not converge in 200 iterations, |grad| = " + std::to_string(gn));
    }

    auto h = hessian_interleaved(p, z);
    for (std::size_t j = 0; j < nv; ++j) {
      if (free[j]) continue;
      const std::size_t lo = j >= h.bandwidth() ? j - h.bandwidth() : 0;
      const std::size_t hi = std::min(nv - 1, j + h.bandwidth());
      for (std::size_t k = lo; k <= hi; ++k) h.at(j, k) = 0.0;
      h.at(j, j) = 1.0;
    }
    auto chol = BandedCholesky::factor(h);
    double shift = 0.0;
    for (int attempt = 0; !chol && attempt < 40; ++attempt) {
      double scale = 0.0;
      for (std::size_t j = 0; j < nv; ++j) scale = std::max(scale, std::abs(h(j, j)));
      shift = shift == 0.0 ? 1e-10 * std::max(scale, 1.0) : shift * 10.0;
      auto shifted = h;
      for (std::size_t j = 0; j < nv; ++j) shifted.at(j, j) += shift;
      chol = BandedCholesky::factor(shifted);
    }
    if (!chol) throw Error(ErrorCode::NonConvergence, "Hessian could not be factored");

    auto step = chol->solve(grad);
    double alpha = 1.0;
    for (std::size_t j = 0; j < nv; ++j) {
      step[j] = free[j] ? -step[j] : 0.0;
      if (step[j] < 0.0 && z[j] > 0.0) alpha = std::min(alpha, kPositivityFraction * z[j] / -step[j]);
    }

    bool accepted = false;
    std::vector<double> trial(nv);
    for (int halving = 0; halving <= kMaxHalvings; ++halving, alpha *= 0.5) {
      for (std::size_t j = 0; j < nv; ++j) trial[j] = z[j] + alpha * step[j];
      const double e = hamiltonian_interleaved(p, trial);
      if (e < energy) {
        energy = e;
        accepted = true;
        break;
      }
      // Near the minimum H changes below rounding; accept a step that still shrinks the gradient.
      if (e <= energy + 1e-13 * std::max(1.0, std::abs(energy))) {
        auto g2 = masked_gradient(trial);
        if (norm2(g2) < gn) {
          energy = e;
          accepted = true;
          break;
        }
      }
    }
    if (converged) {
      polished = true;
      if (!accepted) continue;
    } else if (!accepted) {
      throw Error(ErrorCode::LineSearchStall, "line search stalled at iteration " + std::to_string(iter) +
                                                  ", |grad| = " + std::to_string(gn));
    }
    z = trial;
    grad = masked_gradient(z);
  }
}

}  // namespace

void check_params(const HamiltonianParams& p) {
  if (!(p.beta >= 1.0) || !std::isfinite(p.beta)) throw Error(ErrorCode::InvalidParameters, "beta must be >= 1");
  if (!(p.a > -1.0) || !std::isfinite(p.a)) throw Error(ErrorCode::InvalidParameters, "a must be > -1");
  if (p.n < 1) throw Error(ErrorCode::InvalidParameters, "n must be >= 1");
}

double log_coefficient_x(const HamiltonianParams& p, std::size_t k) {
  return (static_cast<double>(k) + p.a - 1.0 / p.beta) / static_cast<double>(p.n);
}

double log_coefficient_y(const HamiltonianParams& p, std::size_t k) {
  return (static_cast<double>(k) - 1.0 / p.beta) / static_cast<double>(p.n);
}

double trace_V(const HamiltonianParams& p, std::span<const double> x, std::span<const double> y) {
  check_point(p, x, y);
  return trace_and_gradient<double>(p.potential.coefficients(), x, y, false, false).trace;
}

double hamiltonian(const HamiltonianParams& p, std::span<const double> x, std::span<const double> y) {
  double h = trace_V(p, x, y);
  for (std::size_t k = 1; k <= x.size(); ++k) {
    const double c = log_coefficient_x(p, k);
    if (c != 0.0) h -= c * std::log(x[k - 1]);
  }
  for (std::size_t k = 1; k <= y.size(); ++k) {
    const double c = log_coefficient_y(p, k);
    if (c != 0.0) h -= c * std::log(y[k - 1]);
  }
  return h;
}

std::vector<double> grad_trace_V(const HamiltonianParams& p, std::span<const double> x, std::span<const double> y) {
  check_point(p, x, y);
  const auto tg = trace_and_gradient<double>(p.potential.coefficients(), x, y, false, true);
  Bidiagonal b{tg.gx, tg.gy};
  return interleave(b);
}

std::vector<double> grad_hamiltonian(const HamiltonianParams& p, std::span<const double> x,
                                     std::span<const double> y) {
  check_point(p, x, y);
  const auto z = interleave(Bidiagonal{{x.begin(), x.end()}, {y.begin(), y.end()}});
  return interleaved_gradient<double>(p, z);
}

BandedHessian hessian_hamiltonian(const HamiltonianParams& p, std::span<const double> x,
                                  std::span<const double> y) {
  check_point(p, x, y);
  const auto z = interleave(Bidiagonal{{x.begin(), x.end()}, {y.begin(), y.end()}});
  return hessian_interleaved(p, z);
}

double energy_and_gradient(const HamiltonianParams& p, std::span<const double> z, std::span<double> grad) {
  const std::size_t n = p.n;
  std::vector<double> x(n);
  std::vector<double> y(n - 1);
  for (std::size_t i = 0; i < n; ++i) {
    x[i] = z[x_slot(i)];
    if (i + 1 < n) y[i] = z[y_slot(i)];
  }
  const auto tg = trace_and_gradient<double>(p.potential.coefficients(), x, y, false, true);
  double h = tg.trace;
  for (std::size_t i = 0; i < n; ++i) {
    const double cx = log_coefficient_x(p, i + 1);
    grad[x_slot(i)] = tg.gx[i];
    if (cx != 0.0) {
      grad[x_slot(i)] -= cx / x[i];
      h -= cx * std::log(x[i]);
    }
    if (i + 1 < n) {
      const double cy = log_coefficient_y(p, i + 1);
      grad[y_slot(i)] = tg.gy[i];
      if (cy != 0.0) {
        grad[y_slot(i)] -= cy / y[i];
        h -= cy * std::log(y[i]);
      }
    }
  }
  return h;
}

namespace {

// Pins slots whose log coefficient is 0 and rejects negative ones (H unbounded below there).
std::vector<char> free_slots(const HamiltonianParams& p, std::size_t& pinned) {
  const auto c = slot_coefficients(p);
  std::vector<char> free(c.size(), 1);
  pinned = 0;
  for (std::size_t j = 0; j < c.size(); ++j) {
    if (c[j] < 0.0) {
      throw Error(ErrorCode::NoMinimizer, "log coefficient " + std::to_string(c[j]) + " is negative");
    }
    if (c[j] == 0.0) {
      free[j] = 0;
      ++pinned;
    }
  }
  return free;
}

}  // namespace

MinimizerResult minimize(const HamiltonianParams& p, const std::optional<Bidiagonal>& init) {
  check_params(p);
  std::size_t pinned = 0;
  const auto free = free_slots(p, pinned);

  std::vector<double> z;
  if (init) {
    check_point(p, init->x, init->y);
    z = interleave(*init);
  } else if (p.n >= 2) {
    z = interleave(fine_minimizer(ScalingFunctions(p.potential), p.beta, p.a, p.n));
  } else {
    z = {std::sqrt(std::max(log_coefficient_x(p, 1), 1e-3))};
  }
  for (std::size_t j = 0; j < z.size(); ++j) {
    if (!free[j]) z[j] = 0.0;
    else if (!(z[j] > 0.0)) throw Error(ErrorCode::NonPositiveEntry, "initial point must be positive");
  }
  auto result = newton(p, std::move(z), free);
  result.pinned = pinned;
  return result;
}

MinimizerResult conditional_minimize(const HamiltonianParams& p, const ConditionalSpec& spec) {
  check_params(p);
  if (spec.first < 1 || spec.last < spec.first || spec.last > p.n) {
    throw Error(ErrorCode::InvalidParameters, "interval must satisfy 1 <= first <= last <= n");
  }
  check_point(p, spec.background.x, spec.background.y);
  std::size_t pinned = 0;
  auto free = free_slots(p, pinned);
  auto z = interleave(spec.background);
  std::size_t pinned_inside = 0;
  for (std::size_t j = 0; j < z.size(); ++j) {
    const std::size_t site = j / 2 + 1;
    const bool inside = site >= spec.first && site <= spec.last;
    if (!inside) {
      free[j] = 0;
    } else if (!free[j]) {
      z[j] = 0.0;
      ++pinned_inside;
    }
  }
  auto result = newton(p, std::move(z), free);
  result.pinned = pinned_inside;
  return result;
}

std::vector<double> coarse_circulant_hessian(const ValidatedPotential& v, double t, double value, std::size_t sites) {
  const std::size_t d = v.degree();
  if (sites < 2 * d + 2) throw Error(ErrorCode::InvalidParameters, "circulant block too small for the potential degree");
  if (!(value > 0.0)) throw Error(ErrorCode::NonPositiveEntry, "coarse point must be positive");
  const std::size_t nv = 2 * sites;
  std::vector<double> h(nv * nv);
  std::vector<Dual> x(sites);
  std::vector<Dual> y(sites);
  for (std::size_t col = 0; col < nv; ++col) {
    for (std::size_t i = 0; i < sites; ++i) {
      x[i] = Dual(value, col == 2 * i ? 1.0 : 0.0);
      y[i] = Dual(value, col == 2 * i + 1 ? 1.0 : 0.0);
    }
    const auto tg = trace_and_gradient<Dual>(v.coefficients(), x, y, true, true);
    for (std::size_t i = 0; i < sites; ++i) {
      h[(2 * i) * nv + col] = (tg.gx[i] - t / x[i]).d;
      h[(2 * i + 1) * nv + col] = (tg.gy[i] - t / y[i]).d;
    }
  }
  return h;
}

}  // namespace hardedge
