// One PASS/FAIL line per acceptance criterion. Tolerances and sizes are pinned here.

#include <Eigen/Dense>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "hardedge/experiments.hpp"
#include "hardedge/hamiltonian.hpp"
#include "hardedge/potential.hpp"
#include "hardedge/sampler.hpp"
#include "hardedge/spectra.hpp"
#include "hardedge/stats.hpp"

using namespace hardedge;

namespace {

const std::vector<double> kLinear{0.5};
const std::vector<double> kQuartic{0.5, 0.125};

struct Outcome {
  bool pass = false;
  std::string detail;
};

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

HamiltonianParams make(const std::vector<double>& g, double beta, double a, std::size_t n) {
  return {validate_potential(g), beta, a, n};
}

Outcome scaling_functions() {
  const ScalingFunctions sf(validate_potential(kLinear));
  double worst = std::abs(sf.kappa() - 0.25);
  for (int i = 0; i <= 100; ++i) {
    const double t = i / 100.0;
    worst = std::max({worst, std::abs(sf.phi(t) - std::sqrt(t)), std::abs(sf.theta(t) - t)});
  }
  return {worst <= 1e-10, fmt("max error %.2e (tol 1e-10)", worst)};
}

Outcome lattice_paths() {
  bool exact = true;
  for (int m = 1; m <= 5; ++m) exact = exact && lattice_enumerate(m) == lattice_coefficients(m);
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(0.3, 1.5);
  const std::size_t n = 12;
  const auto p = make(kQuartic, 2.0, 0.0, n);
  double worst = 0.0;
  for (int rep = 0; rep < 10; ++rep) {
    std::vector<double> x(n), y(n - 1);
    for (double& v : x) v = u(rng);
    for (double& v : y) v = u(rng);
    const auto g = grad_trace_V(p, x, y);
    for (std::size_t i = 3; i + 2 < n; ++i) {
      const double paths = grad_via_paths(p, x, y, i);
      worst = std::max(worst, std::abs(paths - g[x_slot(i - 1)]) / std::max(1.0, std::abs(paths)));
    }
  }
  return {exact && worst <= 1e-12,
          fmt("enumeration %s for m=1..5, path gradient error %.2e (tol 1e-12)", exact ? "exact" : "differs", worst)};
}

Outcome minimizer() {
  const std::size_t n = 500;
  double worst = 0.0;
  for (double beta : {1.0, 2.0, 4.0}) {
    for (double a : {0.0, 1.5}) {
      const auto r = minimize(make(kLinear, beta, a, n));
      for (std::size_t k = 1; k <= n; ++k) {
        worst = std::max(worst, std::abs(r.x[k - 1] - std::sqrt((k + a - 1.0 / beta) / n)));
        if (k < n) worst = std::max(worst, std::abs(r.y[k - 1] - std::sqrt((k - 1.0 / beta) / n)));
      }
    }
  }
  auto constant = [](std::size_t m) {
    const auto p = make(kQuartic, 2.0, 0.0, m);
    const auto r = minimize(p);
    const auto f = fine_minimizer(ScalingFunctions(p.potential), p.beta, p.a, m);
    double c = 0.0;
    for (std::size_t i = m / 10; i <= 9 * m / 10; ++i) {
      const double w = std::sqrt(static_cast<double>(m) * std::pow(static_cast<double>(i), 3));
      c = std::max(c, w * std::abs(r.x[i - 1] - f.x[i - 1]));
    }
    return c;
  };
  const double c500 = constant(500);
  const double c1000 = constant(1000);
  const double ratio = c1000 / c500;
  return {worst <= 1e-10 && std::abs(ratio - 1.0) <= 0.5,
          fmt("linear error %.2e (tol 1e-10); rate constant %.4f at n=500, %.4f at n=1000, ratio %.3f (tol +-50%%)",
              worst, c500, c1000, ratio)};
}

// Decay lengths of the response to a boundary perturbation of 0.1, left and right of I = [n/4, 3n/4].
std::pair<double, double> decay_lengths(std::size_t n) {
  const auto p = make(kQuartic, 2.0, 0.0, n);
  const auto r = minimize(p);
  ConditionalSpec spec{n / 4, 3 * n / 4, Bidiagonal{r.x, r.y}};
  const std::size_t d = kQuartic.size();
  for (std::size_t k = 1; k <= d; ++k) {
    spec.background.x[spec.first - 1 - k] += 0.1;
    spec.background.y[spec.first - 1 - k] += 0.1;
    spec.background.x[spec.last - 1 + k] += 0.1;
    spec.background.y[spec.last - 1 + k] += 0.1;
  }
  const auto moved = conditional_minimize(p, spec);
  std::vector<double> dist, left, right;
  for (std::size_t k = 2; k <= 40; ++k) {
    dist.push_back(static_cast<double>(k));
    left.push_back(std::abs(moved.x[spec.first - 1 + k - 1] - r.x[spec.first - 1 + k - 1]));
    right.push_back(std::abs(moved.x[spec.last - 1 - (k - 1)] - r.x[spec.last - 1 - (k - 1)]));
  }
  return {fit_exponential_decay(dist, left, 1e-13).length, fit_exponential_decay(dist, right, 1e-13).length};
}

Outcome boundary_decay() {
  const auto [l400, r400] = decay_lengths(400);
  const auto [l800, r800] = decay_lengths(800);
  const double dl = rel(l800, l400);
  const double dr = rel(r800, r400);
  return {dl <= 0.3 && dr <= 0.3,
          fmt("decay length left %.4f -> %.4f, right %.4f -> %.4f (n=400 -> 800; tol 30%%)", l400, l800, r400, r800)};
}

BidiagonalSample laguerre(std::size_t n, double beta, double a, std::uint64_t seed) {
  Rng rng(seed);
  return sample_laguerre_exact(make(kLinear, beta, a, n), rng);
}

// K = B^{-T} with B = diag(X) - subdiag(Y), by triangular solve.
double kernel_error(const BidiagonalSample& s, std::mt19937_64& rng) {
  const auto n = static_cast<Eigen::Index>(s.x.size());
  Eigen::MatrixXd b = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    b(i, i) = s.x[static_cast<std::size_t>(i)];
    if (i + 1 < n) b(i + 1, i) = -s.y[static_cast<std::size_t>(i)];
  }
  const Eigen::MatrixXd binv =
      b.triangularView<Eigen::Lower>().solve(Eigen::MatrixXd::Identity(n, n));
  const Eigen::MatrixXd k = binv.transpose();
  std::normal_distribution<double> nd;
  std::vector<double> v(static_cast<std::size_t>(n));
  for (double& e : v) e = nd(rng);
  const Eigen::Map<const Eigen::VectorXd> vm(v.data(), n);
  const InverseKernelState st(s);
  double worst = 0.0;
  for (bool tr : {false, true}) {
    const auto got = kernel_apply(st, v, tr);
    const Eigen::MatrixXd m = tr ? Eigen::MatrixXd(k.transpose()) : k;
    const Eigen::VectorXd exact = m * vm;
    const Eigen::VectorXd mag = m.cwiseAbs() * vm.cwiseAbs();
    for (Eigen::Index i = 0; i < n; ++i) {
      worst = std::max(worst, std::abs(got[static_cast<std::size_t>(i)] - exact(i)) / mag(i));
    }
  }
  return worst;
}

Outcome spectral_solvers() {
  double dense_err = 0.0;
  for (std::size_t n : {20u, 65u, 120u, 200u}) {
    const auto s = laguerre(n, 2.0, 0.0, 100 + n);
    const int k = 5;
    const auto res = smallest_eigs(s, k);
    const auto nn = static_cast<Eigen::Index>(n);
    Eigen::MatrixXd b = Eigen::MatrixXd::Zero(nn, nn);
    for (Eigen::Index i = 0; i < nn; ++i) {
      b(i, i) = s.x[static_cast<std::size_t>(i)];
      if (i + 1 < nn) b(i + 1, i) = s.y[static_cast<std::size_t>(i)];
    }
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(b * b.transpose(), Eigen::EigenvaluesOnly);
    for (int r = 0; r < k; ++r) dense_err = std::max(dense_err, rel(res.values[static_cast<std::size_t>(r)], es.eigenvalues()(r)));
  }
  const auto big = laguerre(2000, 2.0, 0.0, 7);
  const auto lz = smallest_eigs(big, 4);
  const auto st = sturm_eigs(big, 4);
  double sturm_err = 0.0;
  for (std::size_t r = 0; r < 4; ++r) sturm_err = std::max(sturm_err, rel(lz.values[r], st.values[r]));

  std::mt19937_64 rng(5);
  double kernel_err = std::max(kernel_error(laguerre(100, 2.0, 0.0, 9), rng), kernel_error(laguerre(150, 1.0, 0.5, 10), rng));
  BidiagonalSample stress;
  for (std::size_t i = 0; i < 100; ++i) stress.x.push_back(std::exp(0.1 * std::sin(0.3 * static_cast<double>(i))));
  for (std::size_t i = 0; i < 99; ++i) stress.y.push_back(stress.x[i] * std::exp(i < 50 ? 10.0 : -20.0));
  const double prefix_hi = InverseKernelState(stress).log_prefix()[50];
  kernel_err = std::max(kernel_err, kernel_error(stress, rng));
  return {dense_err <= 1e-7 && sturm_err <= 1e-6 && kernel_err <= 1e-10,
          fmt("lanczos vs dense %.2e (tol 1e-7), vs sturm at n=2000 %.2e (tol 1e-6), kernel %.2e (tol 1e-10, "
              "log prefix up to %.0f)",
              dense_err, sturm_err, kernel_err, prefix_hi)};
}

Outcome circulant() {
  double worst = 0.0;
  for (const auto& g : {kLinear, kQuartic}) {
    const ScalingFunctions sf(validate_potential(g));
    for (double t : {0.3, 0.5, 0.9}) {
      const std::size_t sites = 64;
      const std::size_t nv = 2 * sites;
      const double phi = sf.phi(t);
      const auto h = coarse_circulant_hessian(sf.potential(), t, phi, sites);
      const double lambda = 2.0 * sf.theta(t) / (phi * phi * sf.theta_prime(t));
      for (std::size_t r = 0; r < nv; ++r) {
        double hv = 0.0;
        for (std::size_t c = 0; c < nv; ++c) hv += h[r * nv + c] * (c % 2 == 0 ? 1.0 : -1.0);
        worst = std::max(worst, std::abs(hv - lambda * (r % 2 == 0 ? 1.0 : -1.0)));
      }
    }
  }
  return {worst <= 1e-9, fmt("max residual %.2e (tol 1e-9)", worst)};
}

Outcome sampler() {
  const std::size_t n = 100;
  const std::size_t draws = 5000;
  const auto p = make(kLinear, 2.0, 0.0, n);
  SamplingPlan mcmc;
  mcmc.kind = SamplingPlan::Kind::Mcmc;
  mcmc.chains = 50;
  mcmc.thin = 100;
  const auto chain = draw_samples(p, draws, mcmc, 71);
  const auto exact = draw_samples(p, draws, SamplingPlan{}, 72);
  std::string detail;
  bool pass = true;
  const std::vector<std::pair<std::string, std::function<double(const BidiagonalSample&)>>> marginals{
      {"X_10", [](const BidiagonalSample& s) { return s.x[9]; }},
      {"X_50", [n](const BidiagonalSample& s) { return s.x[n / 2 - 1]; }},
      {"Y_90", [n](const BidiagonalSample& s) { return s.y[n - 11]; }}};
  for (const auto& [name, f] : marginals) {
    std::vector<double> a, b;
    for (const auto& s : chain) a.push_back(f(s));
    for (const auto& s : exact) b.push_back(f(s));
    const double ks = ks_statistic(a, b);
    pass = pass && ks <= 0.03;
    detail += fmt("%s %.4f ", name.c_str(), ks);
  }
  return {pass, "KS " + detail + "(tol 0.03)"};
}

Outcome clt() {
  bool pass = true;
  std::string detail;
  for (double beta : {1.0, 2.0}) {
    ExperimentConfig cfg;
    cfg.potential = kLinear;
    cfg.beta = beta;
    cfg.sizes = {800};
    cfg.replicas = 2000;
    cfg.clt_times = {0.5};
    const auto rep = run_clt_check(cfg);
    const auto& e = rep.body["sizes"][0]["times"][0];
    const double var = e["variance"].get<double>();
    const double predicted = e["predicted_variance"].get<double>();
    const double ks = e["ks_normal"].get<double>();
    const bool ok = std::abs(var / predicted - 1.0) <= 0.10 && ks <= 0.05;
    pass = pass && ok;
    detail += fmt("beta=%g var %.4f vs %.4f, KS %.4f; ", beta, var, predicted, ks);
  }
  return {pass, detail + "(tol 10%, 0.05)"};
}

Outcome change_of_variables() {
  const ScalingFunctions sf(validate_potential(kQuartic));
  const std::size_t cells = 2000;
  const SboModel nat(make_sbo_grid(cells, 1e-6, 2.0, 0.0, SboMode::Native));
  const SboModel gen(make_sbo_grid(cells, 1e-6, 2.0, 0.0, SboMode::General), &sf);
  Rng rng(derive_stream_seed(9, 0));
  const int k = 3;
  const int draws = 21;
  // spec(Kbar^T Kbar) / spec(K^T K) per index = Lambda_general / Lambda_native.
  std::vector<std::vector<double>> ratios(k);
  for (int d = 0; d < draws; ++d) {
    const auto [wn, wg] = coupled_fields(nat, gen, rng);
    const auto a = nat.spectrum(wn, k);
    const auto b = gen.spectrum(wg, k);
    for (int r = 0; r < k; ++r) ratios[static_cast<std::size_t>(r)].push_back(b.values[static_cast<std::size_t>(r)] / a.values[static_cast<std::size_t>(r)]);
  }
  const double kappa = sf.kappa();
  const double literal = 4.0 * kappa * kappa;
  bool pass = true;
  std::string detail = "median ratio";
  double worst_4k = 0.0;
  for (auto& v : ratios) {
    std::sort(v.begin(), v.end());
    const double med = v[v.size() / 2];
    pass = pass && rel(med, literal) <= 0.02;
    worst_4k = std::max(worst_4k, rel(med, 4.0 * kappa));
    detail += fmt(" %.4f", med);
  }
  detail += fmt(" vs 4 kappa^2 = %.4f (tol 2%%); measured factor is 4 kappa = %.4f to %.2f%%", literal, 4.0 * kappa,
                100.0 * worst_4k);
  return {pass, detail};
}

Outcome universality() {
  ExperimentConfig cfg;
  cfg.potential = kLinear;
  cfg.compare_potential = kQuartic;
  cfg.sizes = {400};
  cfg.replicas = 2000;
  cfg.sbo_replicas = 2000;
  cfg.sbo_cells = 2000;
  cfg.k = 1;
  cfg.thin = 100;
  const auto r = run_universality(cfg);
  double worst = 0.0;
  std::string detail = "KS";
  for (const auto& e : r.entries) {
    worst = std::max(worst, e.ks);
    detail += fmt(" %s/%s %.4f", e.first.c_str(), e.second.c_str(), e.ks);
  }
  double worst_control = 0.0;
  for (const auto& c : r.controls) worst_control = std::max(worst_control, c.ks / c.critical);
  detail += fmt(" (tol 0.06); controls %s, max KS/critical %.3f", r.controls_passed ? "pass" : "fail", worst_control);
  return {r.passed && r.controls_passed, detail};
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    double budget_s;
    Outcome (*run)();
  };
  const Criterion criteria[] = {
      {1, "closed-form scaling functions", 1, scaling_functions},
      {2, "lattice-path oracle", 10, lattice_paths},
      {3, "minimizer correctness", 30, minimizer},
      {4, "boundary decay", 60, boundary_decay},
      {5, "spectral solver cross-validation", 60, spectral_solvers},
      {6, "circulant eigenvalue identity", 1, circulant},
      {7, "sampler validation", 300, sampler},
      {8, "CLT check", 900, clt},
      {9, "change-of-variables identity", 120, change_of_variables},
      {10, "universality", 7200, universality},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool pass = o.pass && secs <= c.budget_s;
    failed += !pass;
    std::printf("[%s] %2d %s: %s; %.2f s (budget %.0f s)\n", pass ? "PASS" : "FAIL", c.id, c.name, o.detail.c_str(), secs,
                c.budget_s);
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(std::size(criteria)) - failed, std::size(criteria));
  return failed == 0 ? 0 : 1;
}
