#include "hardedge/bidiagonal.hpp"

namespace hardedge {

std::vector<double> interleave(const Bidiagonal& b) {
  const std::size_t n = b.size();
  std::vector<double> z(n == 0 ? 0 : 2 * n - 1);
  for (std::size_t i = 0; i < n; ++i) {
    z[x_slot(i)] = b.x[i];
    if (i + 1 < n) z[y_slot(i)] = b.y[i];
  }
  return z;
}

Bidiagonal deinterleave(std::span<const double> z) {
  const std::size_t n = (z.size() + 1) / 2;
  Bidiagonal b;
  b.x.resize(n);
  b.y.resize(n == 0 ? 0 : n - 1);
  for (std::size_t i = 0; i < n; ++i) {
    b.x[i] = z[x_slot(i)];
    if (i + 1 < n) b.y[i] = z[y_slot(i)];
  }
  return b;
}

}  // namespace hardedge
