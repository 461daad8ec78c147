#include <algorithm>
#include <cmath>
#include <numeric>

#include "hardedge/error.hpp"
#include "hardedge/spectra.hpp"

namespace hardedge {

SboGrid make_sbo_grid(std::size_t cells, double eps, double beta, double a, SboMode mode) {
  if (cells < 8) throw Error(ErrorCode::InvalidParameters, "SBO grid needs at least 8 cells");
  if (!(eps > 0.0 && eps < 0.01)) throw Error(ErrorCode::InvalidParameters, "cutoff must lie in (0, 0.01)");
  if (!(beta > 0.0) || !(a > -1.0)) throw Error(ErrorCode::InvalidParameters, "need beta > 0 and a > -1");
  const std::size_t geometric = cells / 4;
  const std::size_t uniform = cells - geometric;
  std::vector<double> edges;
  edges.reserve(cells + 1);
  const double ratio = std::log(0.01 / eps) / static_cast<double>(geometric);
  for (std::size_t i = 0; i < geometric; ++i) edges.push_back(eps * std::exp(ratio * static_cast<double>(i)));
  for (std::size_t i = 0; i <= uniform; ++i) edges.push_back(0.01 + 0.99 * static_cast<double>(i) / static_cast<double>(uniform));
  SboGrid g;
  g.eps = eps;
  g.beta = beta;
  g.a = a;
  g.mode = mode;
  for (std::size_t i = 0; i < cells; ++i) {
    g.nodes.push_back(0.5 * (edges[i] + edges[i + 1]));
    g.weights.push_back(edges[i + 1] - edges[i]);
  }
  return g;
}

std::vector<double> sample_log_field(std::span<const double> times, Rng& rng) {
  std::vector<std::size_t> order(times.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return times[i] > times[j]; });
  std::normal_distribution<double> nd(0.0, 1.0);
  std::vector<double> w(times.size());
  double prev = 1.0;
  double value = 0.0;
  for (std::size_t idx : order) {
    const double t = times[idx];
    if (!(t > 0.0 && t <= 1.0)) throw Error(ErrorCode::InvalidParameters, "field times must lie in (0, 1]");
    if (t < prev) value += std::sqrt(std::log(prev / t)) * nd(rng);
    prev = t;
    w[idx] = value;
  }
  return w;
}

SboModel::SboModel(SboGrid grid, const ScalingFunctions* sf) : grid_(std::move(grid)) {
  const std::size_t m = grid_.nodes.size();
  base_u_.resize(m);
  base_v_.resize(m);
  if (grid_.mode == SboMode::Native) {
    times_ = grid_.nodes;
    for (std::size_t i = 0; i < m; ++i) {
      const double ls = std::log(grid_.nodes[i]);
      const double lw = 0.5 * std::log(grid_.weights[i]);
      base_u_[i] = 0.5 * grid_.a * ls + lw;
      base_v_[i] = -0.5 * (grid_.a + 1.0) * ls + lw;
    }
    return;
  }
  if (sf == nullptr) throw Error(ErrorCode::InvalidParameters, "general SBO kernel needs scaling functions");
  const auto integrals = sf->inverse_phi_integrals(grid_.nodes);
  const double c = 0.5 * grid_.a + 0.25;
  times_.resize(m);
  for (std::size_t i = 0; i < m; ++i) {
    const double theta = sf->kappa() * integrals[i] * integrals[i];
    times_[i] = std::min(theta, 1.0);
    const double half_log_phi = 0.5 * std::log(sf->phi(grid_.nodes[i]));
    const double lw = 0.5 * std::log(grid_.weights[i]);
    base_u_[i] = -half_log_phi + c * std::log(theta) + lw;
    base_v_[i] = -half_log_phi - c * std::log(theta) + lw;
  }
}

void SboModel::log_factors(std::span<const double> field, std::vector<double>& lu, std::vector<double>& lv) const {
  const std::size_t m = base_u_.size();
  if (field.size() != m) throw Error(ErrorCode::InvalidParameters, "field length does not match the grid");
  const double scale = 1.0 / std::sqrt(grid_.beta);
  lu.resize(m);
  lv.resize(m);
  for (std::size_t i = 0; i < m; ++i) {
    lu[i] = base_u_[i] + scale * field[i];
    lv[i] = base_v_[i] - scale * field[i];
  }
}

SpectrumResult SboModel::spectrum(std::span<const double> field, int k) const {
  if (k < 1 || k > 20) throw Error(ErrorCode::InvalidParameters, "k must lie in [1, 20]");
  std::vector<double> lu, lv;
  log_factors(field, lu, lv);
  const std::size_t m = lu.size();
  std::vector<double> eu(m), ev(m), mid(m);
  for (std::size_t i = 0; i < m; ++i) {
    eu[i] = std::exp(lu[i]);
    ev[i] = std::exp(lv[i]);
    if (!std::isfinite(eu[i]) || !std::isfinite(ev[i])) throw Error(ErrorCode::NonFinite, "SBO kernel overflow");
  }
  constexpr double kDiagonal = 0.5;
  // M = D_u (U + I/2) D_v with U the strictly upper matrix of ones.
  const SymmetricOperator op = [&](std::span<const double> in, std::span<double> out) {
    double acc = 0.0;
    for (std::size_t i = m; i-- > 0;) {
      const double t = ev[i] * in[i];
      mid[i] = eu[i] * (acc + kDiagonal * t);
      acc += t;
    }
    acc = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
      const double s = eu[j] * mid[j];
      out[j] = ev[j] * (acc + kDiagonal * s);
      acc += s;
    }
  };
  const TopEigs top = top_eigenvalues(m, op, k, 1e-8, 500);
  SpectrumResult res;
  res.iterations = top.matvecs;
  for (std::size_t r = 0; r < top.values.size(); ++r) {
    res.values.push_back(1.0 / top.values[r]);
    res.residuals.push_back(top.residuals[r]);
  }
  return res;
}

SpectrumResult SboModel::draw(Rng& rng, int k) const { return spectrum(sample_log_field(times_, rng), k); }

double SboModel::strict_hs_norm_squared(std::span<const double> field) const {
  std::vector<double> lu, lv;
  log_factors(field, lu, lv);
  double below = 0.0;
  double total = 0.0;
  for (std::size_t j = 0; j < lu.size(); ++j) {
    total += std::exp(2.0 * lv[j]) * below;
    below += std::exp(2.0 * lu[j]);
  }
  return total;
}

std::pair<std::vector<double>, std::vector<double>> coupled_fields(const SboModel& first, const SboModel& second,
                                                                   Rng& rng) {
  const auto& t1 = first.noise_times();
  const auto& t2 = second.noise_times();
  std::vector<double> all(t1);
  all.insert(all.end(), t2.begin(), t2.end());
  const auto w = sample_log_field(all, rng);
  const auto split = static_cast<std::ptrdiff_t>(t1.size());
  return {std::vector<double>(w.begin(), w.begin() + split), std::vector<double>(w.begin() + split, w.end())};
}

double sbo_self_check(const SboModel& coarse, const ScalingFunctions* sf, Rng& rng, double tolerance) {
  const SboGrid& g = coarse.grid();
  const SboModel fine(make_sbo_grid(2 * g.nodes.size(), g.eps, g.beta, g.a, g.mode), sf);
  const auto [wc, wf] = coupled_fields(coarse, fine, rng);
  const double lc = coarse.spectrum(wc, 1).values[0];
  const double lf = fine.spectrum(wf, 1).values[0];
  const double change = std::abs(lc - lf) / lf;
  if (change > tolerance) {
    throw Error(ErrorCode::GridTooCoarse, "doubling the grid moved Lambda_1 by " + std::to_string(100.0 * change) + "%");
  }
  return change;
}

}  // namespace hardedge
