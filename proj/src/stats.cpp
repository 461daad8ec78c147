#include "hardedge/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "hardedge/error.hpp"

namespace hardedge {

namespace {

double ks_sorted(const std::vector<double>& a, const std::vector<double>& b) {
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  std::size_t i = 0;
  std::size_t j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double v = std::min(a[i], b[j]);
    while (i < a.size() && a[i] == v) ++i;
    while (j < b.size() && b[j] == v) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  return d;
}

void require_nonempty(std::span<const double> v) {
  if (v.empty()) throw Error(ErrorCode::Empty, "empty sample");
}

}  // namespace

double ks_statistic(std::span<const double> a, std::span<const double> b) {
  require_nonempty(a);
  require_nonempty(b);
  std::vector<double> sa(a.begin(), a.end());
  std::vector<double> sb(b.begin(), b.end());
  std::sort(sa.begin(), sa.end());
  std::sort(sb.begin(), sb.end());
  return ks_sorted(sa, sb);
}

double ks_normal(std::span<const double> sample) {
  require_nonempty(sample);
  std::vector<double> s(sample.begin(), sample.end());
  std::sort(s.begin(), s.end());
  const double n = static_cast<double>(s.size());
  double d = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double f = 0.5 * std::erfc(-s[i] / std::sqrt(2.0));
    d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
  }
  return d;
}

double ks_critical(std::size_t na, std::size_t nb, double alpha) {
  const double c = std::sqrt(-0.5 * std::log(alpha / 2.0));
  const double a = static_cast<double>(na);
  const double b = static_cast<double>(nb);
  return c * std::sqrt((a + b) / (a * b));
}

Band bootstrap_ks_band(std::span<const double> a, std::span<const double> b, int resamples, std::uint64_t seed) {
  require_nonempty(a);
  require_nonempty(b);
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick_a(0, a.size() - 1);
  std::uniform_int_distribution<std::size_t> pick_b(0, b.size() - 1);
  std::vector<double> stats;
  stats.reserve(static_cast<std::size_t>(resamples));
  std::vector<double> ra(a.size());
  std::vector<double> rb(b.size());
  for (int r = 0; r < resamples; ++r) {
    for (auto& v : ra) v = a[pick_a(rng)];
    for (auto& v : rb) v = b[pick_b(rng)];
    std::sort(ra.begin(), ra.end());
    std::sort(rb.begin(), rb.end());
    stats.push_back(ks_sorted(ra, rb));
  }
  std::sort(stats.begin(), stats.end());
  auto q = [&](double p) {
    const auto k = static_cast<std::size_t>(std::floor(p * static_cast<double>(stats.size() - 1)));
    return stats[k];
  };
  return {q(0.025), q(0.975)};
}

double split_half_ks(std::span<const double> sample) {
  if (sample.size() < 2) throw Error(ErrorCode::Empty, "split-half control needs two values");
  std::vector<double> even;
  std::vector<double> odd;
  for (std::size_t i = 0; i < sample.size(); ++i) (i % 2 == 0 ? even : odd).push_back(sample[i]);
  return ks_statistic(even, odd);
}

double mean(std::span<const double> v) {
  require_nonempty(v);
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double covariance(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size() || a.size() < 2) throw Error(ErrorCode::Empty, "covariance needs two paired values");
  const double ma = mean(a);
  const double mb = mean(b);
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - ma) * (b[i] - mb);
  return s / static_cast<double>(a.size() - 1);
}

double variance(std::span<const double> v) { return covariance(v, v); }

double correlation(std::span<const double> a, std::span<const double> b) {
  return covariance(a, b) / std::sqrt(variance(a) * variance(b));
}

DecayFit fit_exponential_decay(std::span<const double> distance, std::span<const double> response, double floor) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  std::size_t m = 0;
  for (std::size_t i = 0; i < distance.size(); ++i) {
    if (!(response[i] > floor)) continue;
    const double x = distance[i];
    const double y = std::log(response[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++m;
  }
  if (m < 2) throw Error(ErrorCode::Empty, "decay fit needs two resolvable points");
  const double md = static_cast<double>(m);
  const double slope = (md * sxy - sx * sy) / (md * sxx - sx * sx);
  const double intercept = (sy - slope * sx) / md;
  return {-1.0 / slope, slope, intercept, m};
}

}  // namespace hardedge
