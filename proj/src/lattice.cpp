#include <cstdint>
#include <string>
#include <vector>

#include "hardedge/error.hpp"
#include "hardedge/hamiltonian.hpp"

namespace hardedge {

namespace {

std::int64_t checked_mul(std::int64_t a, std::int64_t b) {
  std::int64_t r = 0;
  if (__builtin_mul_overflow(a, b, &r)) throw Error(ErrorCode::Overflow, "64-bit overflow in lattice coefficients");
  return r;
}

// C(n, k) by the multiplicative formula; each partial product is itself a binomial.
std::int64_t binomial(std::int64_t n, std::int64_t k) {
  if (k < 0 || k > n) return 0;
  std::int64_t c = 1;
  for (std::int64_t j = 1; j <= k; ++j) c = checked_mul(c, n - k + j) / j;
  return c;
}

struct Walk {
  std::vector<int> heights;  // height before each step, relative to the start
  std::vector<char> right;   // step is horizontal
};

// Closed walks of 2m steps: odd steps right or down, even steps right or up.
std::vector<Walk> closed_walks(int m) {
  std::vector<Walk> out;
  const int len = 2 * m;
  for (std::uint32_t mask = 0; mask < (1u << len); ++mask) {
    Walk w;
    w.heights.resize(len);
    w.right.resize(len);
    int h = 0;
    for (int j = 0; j < len; ++j) {
      w.heights[j] = h;
      const bool diagonal = (mask >> j) & 1u;
      w.right[j] = !diagonal;
      if (diagonal) h += j % 2 == 0 ? -1 : 1;
    }
    if (h == 0) out.push_back(std::move(w));
  }
  return out;
}

}  // namespace

LatticeCoefficients lattice_coefficients(int m) {
  if (m < 1) throw Error(ErrorCode::InvalidParameters, "lattice coefficients need m >= 1");
  const std::int64_t mm = m;
  // A / (2m - 1) = 2 C(2m-2, m-1), which keeps every form integral.
  const std::int64_t unit = checked_mul(2, binomial(2 * mm - 2, mm - 1));
  return {checked_mul(unit, 2 * mm - 1), checked_mul(unit, checked_mul(2 * mm, mm) - 2 * mm + 1),
          checked_mul(unit, checked_mul(2 * mm, mm) - 2 * mm), -checked_mul(unit, checked_mul(mm, mm) - mm)};
}

LatticeCoefficients lattice_enumerate(int m) {
  if (m < 1) throw Error(ErrorCode::InvalidParameters, "path enumeration needs m >= 1");
  if (m > 6) throw Error(ErrorCode::TooLarge, "path enumeration limited to m <= 6");
  LatticeCoefficients sum{0, 0, 0, 0};
  for (const auto& w : closed_walks(m)) {
    const int len = 2 * m;
    int rights = 0;
    for (int j = 0; j < len; ++j) rights += w.right[j];
    // Every base height that puts some right step at level 0.
    for (int h0 = -len; h0 <= len; ++h0) {
      int r = 0;
      int offsets = 0;
      for (int j = 0; j < len; ++j) {
        const int h = h0 + w.heights[j];
        if (w.right[j]) {
          r += h == 0;
          offsets += h;
        } else {
          offsets += j % 2 == 0 ? h - 1 : h;
        }
      }
      if (r == 0) continue;
      sum.a += r;
      sum.b += r * (rights - 1);
      sum.c += r * (len - rights);
      sum.d += r * offsets;
    }
  }
  return sum;
}

std::int64_t rooted_path_count(int m) {
  if (m < 1 || m > 6) throw Error(ErrorCode::TooLarge, "path enumeration limited to 1 <= m <= 6");
  std::int64_t count = 0;
  for (const auto& w : closed_walks(m)) count += w.right[0];
  return count;
}

double grad_via_paths(const HamiltonianParams& p, std::span<const double> x, std::span<const double> y,
                      std::size_t i) {
  const std::size_t d = p.potential.degree();
  if (d > 4) throw Error(ErrorCode::TooLarge, "path oracle limited to degree <= 4");
  if (!(i > d && i + d < p.n)) {
    throw Error(ErrorCode::IndexOutOfBulk, "index " + std::to_string(i) + " is not in (d, n-d)");
  }
  if (x.size() != p.n || y.size() + 1 != p.n) throw Error(ErrorCode::InvalidParameters, "array sizes");
  const long base = static_cast<long>(i) - 1;  // 0-based site of x_i
  double total = 0.0;
  for (std::size_t m = 1; m <= d; ++m) {
    const double gm = p.potential.coefficient(m);
    if (gm == 0.0) continue;
    const int len = 2 * static_cast<int>(m);
    double sum = 0.0;
    for (const auto& w : closed_walks(static_cast<int>(m))) {
      for (int h0 = -len; h0 <= len; ++h0) {
        int r = 0;
        for (int j = 0; j < len; ++j) r += w.right[j] && h0 + w.heights[j] == 0;
        if (r == 0) continue;
        double product = 1.0;
        for (int j = 0; j < len; ++j) {
          const long h = h0 + w.heights[j];
          if (w.right[j]) {
            product *= x[static_cast<std::size_t>(base + h)];
          } else {
            product *= y[static_cast<std::size_t>(base + (j % 2 == 0 ? h - 1 : h))];
          }
        }
        sum += r * product / x[static_cast<std::size_t>(base)];
      }
    }
    total += gm * sum;
  }
  return total;
}

}  // namespace hardedge
