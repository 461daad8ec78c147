#pragma once

#include <cstddef>
#include <vector>

namespace hardedge {

/// Gauss-Legendre nodes and weights on [-1, 1].
struct GaussLegendreRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

GaussLegendreRule gauss_legendre(std::size_t points);

/// Shared 64-, 32- and 16-point rules, built once.
const GaussLegendreRule& gauss_legendre_64();
const GaussLegendreRule& gauss_legendre_32();
const GaussLegendreRule& gauss_legendre_16();

/// Integrates f over [lo, hi] with the given rule.
template <class F>
double integrate_panel(const GaussLegendreRule& rule, F&& f, double lo, double hi) {
  const double half = 0.5 * (hi - lo);
  const double mid = 0.5 * (hi + lo);
  double sum = 0.0;
  for (std::size_t k = 0; k < rule.nodes.size(); ++k) sum += rule.weights[k] * f(mid + half * rule.nodes[k]);
  return half * sum;
}

}  // namespace hardedge
