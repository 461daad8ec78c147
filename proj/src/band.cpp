#include "hardedge/band.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace hardedge {

std::vector<double> BandedSymmetric::multiply(std::span<const double> v) const {
  std::vector<double> out(size_, 0.0);
  for (std::size_t i = 0; i < size_; ++i) {
    const std::size_t lo = i >= bandwidth_ ? i - bandwidth_ : 0;
    for (std::size_t j = lo; j < i; ++j) {
      const double aij = (*this)(i, j);
      out[i] += aij * v[j];
      out[j] += aij * v[i];
    }
    out[i] += (*this)(i, i) * v[i];
  }
  return out;
}

std::optional<BandedCholesky> BandedCholesky::factor(const BandedSymmetric& a) {
  const std::size_t n = a.size();
  const std::size_t b = a.bandwidth();
  BandedSymmetric l(n, b);
  double min_pivot = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < n; ++j) {
    const std::size_t lo = j >= b ? j - b : 0;
    double d = a(j, j);
    for (std::size_t k = lo; k < j; ++k) d -= l(j, k) * l(j, k);
    if (!(d > 0.0) || !std::isfinite(d)) return std::nullopt;
    min_pivot = std::min(min_pivot, d);
    const double ljj = std::sqrt(d);
    l.at(j, j) = ljj;
    const std::size_t hi = std::min(n - 1, j + b);
    for (std::size_t i = j + 1; i <= hi; ++i) {
      const std::size_t klo = i >= b ? i - b : 0;
      double s = a(i, j);
      for (std::size_t k = klo; k < j; ++k) s -= l(i, k) * l(j, k);
      l.at(i, j) = s / ljj;
    }
  }
  BandedCholesky out(std::move(l));
  out.min_pivot_ = min_pivot;
  return out;
}

std::vector<double> BandedCholesky::solve(std::span<const double> rhs) const {
  const std::size_t n = l_.size();
  const std::size_t b = l_.bandwidth();
  std::vector<double> x(rhs.begin(), rhs.end());
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t lo = i >= b ? i - b : 0;
    for (std::size_t k = lo; k < i; ++k) x[i] -= l_(i, k) * x[k];
    x[i] /= l_(i, i);
  }
  for (std::size_t ii = n; ii-- > 0;) {
    const std::size_t hi = std::min(n - 1, ii + b);
    for (std::size_t k = ii + 1; k <= hi; ++k) x[ii] -= l_(k, ii) * x[k];
    x[ii] /= l_(ii, ii);
  }
  return x;
}

}  // namespace hardedge
