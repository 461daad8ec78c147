#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace hardedge {

/// Entries of the lower bidiagonal matrix B(x, y): B(i,i) = x_i, B(i+1,i) = -y_i.
/// x has n entries, y has n-1.
struct Bidiagonal {
  std::vector<double> x;
  std::vector<double> y;

  std::size_t size() const noexcept { return x.size(); }
};

/// Interleaved ordering (x1, y1, x2, y2, ..., xn) used by the Hessian and the samplers.
std::vector<double> interleave(const Bidiagonal& b);
Bidiagonal deinterleave(std::span<const double> z);

inline std::size_t x_slot(std::size_t i) { return 2 * i; }      // 0-based site i
inline std::size_t y_slot(std::size_t i) { return 2 * i + 1; }  // 0-based site i

}  // namespace hardedge
