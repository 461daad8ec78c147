#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace hardedge {

/// Symmetric matrix with half-bandwidth b, lower band stored row by row.
class BandedSymmetric {
 public:
  BandedSymmetric() = default;
  BandedSymmetric(std::size_t size, std::size_t bandwidth)
      : size_(size), bandwidth_(bandwidth), data_(size * (bandwidth + 1), 0.0) {}

  std::size_t size() const noexcept { return size_; }
  std::size_t bandwidth() const noexcept { return bandwidth_; }

  /// Entry (i, j); zero outside the band.
  double operator()(std::size_t i, std::size_t j) const {
    if (i < j) std::swap(i, j);
    if (i - j > bandwidth_) return 0.0;
    return data_[i * (bandwidth_ + 1) + (i - j)];
  }

  /// Mutable entry (i, j) with |i - j| <= bandwidth().
  double& at(std::size_t i, std::size_t j) {
    if (i < j) std::swap(i, j);
    return data_[i * (bandwidth_ + 1) + (i - j)];
  }

  std::vector<double> multiply(std::span<const double> v) const;

 private:
  std::size_t size_ = 0;
  std::size_t bandwidth_ = 0;
  std::vector<double> data_;
};

/// Cholesky factor L L^T of a banded symmetric positive definite matrix.
class BandedCholesky {
 public:
  /// Returns nothing when a pivot is not positive (matrix not positive definite).
  static std::optional<BandedCholesky> factor(const BandedSymmetric& a);

  std::vector<double> solve(std::span<const double> rhs) const;

  /// Smallest diagonal entry of L squared; a crude positivity margin.
  double min_pivot() const noexcept { return min_pivot_; }

 private:
  explicit BandedCholesky(BandedSymmetric l) : l_(std::move(l)) {}
  BandedSymmetric l_;
  double min_pivot_ = 0.0;
};

}  // namespace hardedge
