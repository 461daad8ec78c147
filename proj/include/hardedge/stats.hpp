#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace hardedge {

/// Two-sample Kolmogorov-Smirnov sup-distance. Throws Empty if either sample is empty.
double ks_statistic(std::span<const double> a, std::span<const double> b);

/// One-sample KS distance of `sample` against the standard normal CDF.
double ks_normal(std::span<const double> sample);

/// Asymptotic two-sample critical value sqrt(-log(alpha/2)/2) * sqrt((na+nb)/(na nb)).
double ks_critical(std::size_t na, std::size_t nb, double alpha);

struct Band {
  double lo = 0.0;
  double hi = 0.0;
};

/// Percentile band (2.5%, 97.5%) of the two-sample KS distance under independent resampling
/// of each sample with replacement.
Band bootstrap_ks_band(std::span<const double> a, std::span<const double> b, int resamples, std::uint64_t seed);

/// Splits by parity of position (even indices vs odd), which is order-free for i.i.d. replicas
/// and robust to slow drift in a chain-ordered sequence.
double split_half_ks(std::span<const double> sample);

double mean(std::span<const double> v);
double variance(std::span<const double> v);  // unbiased
double covariance(std::span<const double> a, std::span<const double> b);
double correlation(std::span<const double> a, std::span<const double> b);

struct DecayFit {
  double length = 0.0;  // -1 / slope of log|response| against distance
  double slope = 0.0;
  double intercept = 0.0;
  std::size_t points = 0;
};

/// Least-squares fit of log(response) = intercept + slope * distance over entries with
/// response > floor. Needs at least two such points.
DecayFit fit_exponential_decay(std::span<const double> distance, std::span<const double> response, double floor);

}  // namespace hardedge
