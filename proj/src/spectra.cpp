#include "hardedge/spectra.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <random>

#include "hardedge/error.hpp"

namespace hardedge {

InverseKernelState::InverseKernelState(std::span<const double> x, std::span<const double> y) {
  const std::size_t n = x.size();
  if (n == 0 || y.size() + 1 != n) throw Error(ErrorCode::NonFinite, "kernel needs n diagonal and n-1 off-diagonal entries");
  inv_x_.resize(n);
  log_x_.resize(n);
  ratio_.resize(n - 1);
  log_prefix_.assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    if (!(x[i] > 0.0) || !std::isfinite(x[i])) throw Error(ErrorCode::NonFinite, "diagonal entries must be positive");
    inv_x_[i] = 1.0 / x[i];
    log_x_[i] = std::log(x[i]);
  }
  for (std::size_t k = 0; k + 1 < n; ++k) {
    if (!(y[k] >= 0.0) || !std::isfinite(y[k])) throw Error(ErrorCode::NonFinite, "off-diagonal entries must be finite and >= 0");
    ratio_[k] = y[k] / x[k];
    log_prefix_[k + 1] = log_prefix_[k] + std::log(y[k]) - log_x_[k];
  }
}

double InverseKernelState::entry(std::size_t i, std::size_t j) const {
  if (i > j) return 0.0;
  if (i == j) return inv_x_[j];
  return std::exp(log_prefix_[j] - log_prefix_[i] - log_x_[j]);
}

void InverseKernelState::apply(std::span<const double> v, std::span<double> out, bool transpose) const {
  const std::size_t n = size();
  for (double e : v) {
    if (!std::isfinite(e)) throw Error(ErrorCode::NonFinite, "kernel input is not finite");
  }
  if (!transpose) {
    double s = 0.0;
    for (std::size_t i = n; i-- > 0;) {
      s = v[i] * inv_x_[i] + (i + 1 < n ? ratio_[i] * s : 0.0);
      out[i] = s;
    }
  } else {
    double r = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      r = v[j] + (j > 0 ? ratio_[j - 1] * r : 0.0);
      out[j] = r * inv_x_[j];
    }
  }
}

std::vector<double> kernel_apply(const InverseKernelState& state, std::span<const double> v, bool transpose) {
  if (v.size() != state.size()) throw Error(ErrorCode::NonFinite, "vector length does not match the kernel");
  std::vector<double> out(v.size());
  state.apply(v, out, transpose);
  return out;
}

// ---------------------------------------------------------------------------------------------
// Thick-restart Lanczos

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

TopEigs dense_top(std::size_t dim, const SymmetricOperator& apply, int k) {
  MatrixXd a(dim, dim);
  std::vector<double> e(dim, 0.0), col(dim);
  for (std::size_t j = 0; j < dim; ++j) {
    e[j] = 1.0;
    apply(e, col);
    e[j] = 0.0;
    for (std::size_t i = 0; i < dim; ++i) a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = col[i];
  }
  const MatrixXd sym = 0.5 * (a + a.transpose());
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(sym);
  TopEigs out;
  out.matvecs = static_cast<int>(dim);
  for (int r = 0; r < k; ++r) {
    const auto idx = static_cast<Eigen::Index>(dim) - 1 - r;
    const double mu = es.eigenvalues()(idx);
    const VectorXd u = es.eigenvectors().col(idx);
    out.values.push_back(mu);
    out.residuals.push_back((a * u - mu * u).norm() / std::abs(mu));
  }
  return out;
}

// Two passes of classical Gram-Schmidt against the first `cols` columns.
VectorXd orthogonalize(const MatrixXd& v, Eigen::Index cols, VectorXd& w) {
  VectorXd h = VectorXd::Zero(cols);
  for (int pass = 0; pass < 2; ++pass) {
    const VectorXd c = v.leftCols(cols).transpose() * w;
    w.noalias() -= v.leftCols(cols) * c;
    h += c;
  }
  return h;
}

}  // namespace

TopEigs top_eigenvalues(std::size_t dim, const SymmetricOperator& apply, int k, double rtol, int max_matvecs,
                        std::uint64_t seed) {
  if (k < 1 || static_cast<std::size_t>(k) > dim) throw Error(ErrorCode::InvalidParameters, "need 1 <= k <= dimension");
  if (dim <= 64) return dense_top(dim, apply, k);

  const auto n = static_cast<Eigen::Index>(dim);
  const Eigen::Index m = std::min<Eigen::Index>(n, std::max(4 * k, 16));
  MatrixXd v(n, m + 1);
  MatrixXd t = MatrixXd::Zero(m, m);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd(0.0, 1.0);
  auto random_unit = [&](Eigen::Index cols) {
    VectorXd r(n);
    for (auto& e : r) e = nd(rng);
    orthogonalize(v, cols, r);
    return VectorXd(r / r.norm());
  };
  v.col(0) = random_unit(0);

  std::vector<double> in(dim), out(dim);
  int matvecs = 0;
  Eigen::Index kept = 0;
  double beta = 0.0;
  for (;;) {
    for (Eigen::Index j = kept; j < m; ++j) {
      Eigen::Map<VectorXd>(in.data(), n) = v.col(j);
      apply(in, out);
      ++matvecs;
      VectorXd w = Eigen::Map<const VectorXd>(out.data(), n);
      const VectorXd h = orthogonalize(v, j + 1, w);
      t.block(0, j, j + 1, 1) = h;
      t.block(j, 0, 1, j + 1) = h.transpose();
      beta = w.norm();
      const double scale = t.topLeftCorner(j + 1, j + 1).cwiseAbs().maxCoeff();
      if (beta <= 1e-13 * scale) {
        // Invariant subspace: continue the basis with a fresh direction.
        beta = 0.0;
        v.col(j + 1) = random_unit(j + 1);
      } else {
        v.col(j + 1) = w / beta;
      }
    }
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(t);
    bool converged = true;
    for (int r = 0; r < k; ++r) {
      const Eigen::Index idx = m - 1 - r;
      const double mu = es.eigenvalues()(idx);
      if (std::abs(beta * es.eigenvectors()(m - 1, idx)) > rtol * std::abs(mu)) converged = false;
    }
    if (converged || m == n) {
      TopEigs res;
      res.matvecs = matvecs;
      for (int r = 0; r < k; ++r) {
        const Eigen::Index idx = m - 1 - r;
        const double mu = es.eigenvalues()(idx);
        VectorXd u = v.leftCols(m) * es.eigenvectors().col(idx);
        u.normalize();
        Eigen::Map<VectorXd>(in.data(), n) = u;
        apply(in, out);
        ++res.matvecs;
        res.values.push_back(mu);
        res.residuals.push_back((Eigen::Map<const VectorXd>(out.data(), n) - mu * u).norm() / std::abs(mu));
      }
      return res;
    }
    if (matvecs >= max_matvecs) {
      throw Error(ErrorCode::NoConvergence, "Lanczos did not converge in " + std::to_string(matvecs) + " products");
    }
    // Keep the leading Ritz vectors and the residual direction.
    kept = std::min<Eigen::Index>(m - 1, k + (m - k) / 2);
    const MatrixXd y = es.eigenvectors().rightCols(kept);
    const VectorXd residual_dir = v.col(m);
    v.leftCols(kept) = v.leftCols(m) * y;
    v.col(kept) = residual_dir;
    t.setZero();
    for (Eigen::Index i = 0; i < kept; ++i) t(i, i) = es.eigenvalues()(m - kept + i);
  }
}

SpectrumResult smallest_eigs(const BidiagonalSample& sample, int k) {
  if (k < 1 || k > 20) throw Error(ErrorCode::InvalidParameters, "k must lie in [1, 20]");
  const InverseKernelState state(sample);
  std::vector<double> mid(state.size());
  const SymmetricOperator op = [&](std::span<const double> in, std::span<double> out) {
    state.apply(in, mid, false);
    state.apply(mid, out, true);
  };
  const TopEigs top = top_eigenvalues(state.size(), op, k, 1e-8, 500);
  SpectrumResult res;
  res.iterations = top.matvecs;
  for (std::size_t r = 0; r < top.values.size(); ++r) {
    res.values.push_back(1.0 / top.values[r]);
    res.residuals.push_back(top.residuals[r]);
  }
  return res;
}

// ---------------------------------------------------------------------------------------------
// Sturm bisection on B B^T

namespace {

struct Tridiagonal {
  std::vector<double> diag;
  std::vector<double> off_sq;  // squared off-diagonal
  double norm_bound = 0.0;
};

Tridiagonal form_gram(const BidiagonalSample& s) {
  const std::size_t n = s.x.size();
  if (n == 0 || s.y.size() + 1 != n) throw Error(ErrorCode::InvalidParameters, "malformed sample");
  Tridiagonal t;
  t.diag.resize(n);
  t.off_sq.resize(n > 0 ? n - 1 : 0);
  for (std::size_t i = 0; i < n; ++i) {
    t.diag[i] = s.x[i] * s.x[i] + (i > 0 ? s.y[i - 1] * s.y[i - 1] : 0.0);
    if (i + 1 < n) {
      const double o = s.x[i] * s.y[i];
      t.off_sq[i] = o * o;
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    const double r = (i > 0 ? std::sqrt(t.off_sq[i - 1]) : 0.0) + (i + 1 < n ? std::sqrt(t.off_sq[i]) : 0.0);
    t.norm_bound = std::max(t.norm_bound, t.diag[i] + r);
  }
  return t;
}

std::size_t count_below(const Tridiagonal& t, double shift) {
  const double pivmin = std::numeric_limits<double>::min() * std::max(1.0, t.norm_bound * t.norm_bound);
  std::size_t count = 0;
  double d = 1.0;
  for (std::size_t i = 0; i < t.diag.size(); ++i) {
    d = t.diag[i] - shift - (i > 0 ? t.off_sq[i - 1] / d : 0.0);
    if (std::abs(d) < pivmin) d = -pivmin;
    if (d < 0.0) ++count;
  }
  return count;
}

}  // namespace

std::size_t sturm_count(const BidiagonalSample& sample, double shift) { return count_below(form_gram(sample), shift); }

SpectrumResult sturm_eigs(const BidiagonalSample& sample, int k) {
  if (sample.x.size() > 10000) throw Error(ErrorCode::TooLarge, "Sturm bisection is limited to n <= 1e4");
  if (k < 1 || static_cast<std::size_t>(k) > sample.x.size()) throw Error(ErrorCode::InvalidParameters, "need 1 <= k <= n");
  const Tridiagonal t = form_gram(sample);
  SpectrumResult res;
  double lo = 0.0;
  for (int r = 0; r < k; ++r) {
    // Eigenvalue r (0-based) is the smallest shift with count_below > r.
    double hi = t.norm_bound * (1.0 + 1e-12) + 1e-300;
    for (int it = 0; it < 400 && hi - lo > 1e-10 * hi; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (count_below(t, mid) > static_cast<std::size_t>(r)) {
        hi = mid;
      } else {
        lo = mid;
      }
      ++res.iterations;
    }
    const double lambda = 0.5 * (lo + hi);
    res.values.push_back(lambda);
    if (lambda / t.norm_bound < 1e-13) {
      res.warnings.push_back("lambda_" + std::to_string(r + 1) +
                             " is below 1e-13 ||T||; the explicit Gram matrix limits its relative accuracy");
    }
  }
  return res;
}

SpectrumResult rescale_hard_edge(const SpectrumResult& raw, double kappa, std::size_t n) {
  if (raw.rescaled) throw Error(ErrorCode::DoubleRescale, "eigenvalues are already in hard-edge units");
  if (!(kappa > 0.0)) throw Error(ErrorCode::InvalidParameters, "kappa must be positive");
  const double nn = static_cast<double>(n);
  const double factor = nn * nn / (4.0 * kappa);
  SpectrumResult out = raw;
  for (double& v : out.values) v *= factor;
  out.rescale_factor = factor;
  out.rescaled = true;
  return out;
}

void write_spectra_csv(std::ostream& out, const std::string& header, std::span<const SpectrumRow> rows) {
  out << "# " << header << "\n";
  std::size_t k = 0;
  for (const auto& r : rows) k = std::max(k, r.result.values.size());
  out << "replica_seed,size,rescale_factor";
  for (std::size_t i = 1; i <= k; ++i) out << ",lambda_" << i;
  out << "\n";
  const auto old_precision = out.precision(17);
  for (const auto& r : rows) {
    out << r.seed << "," << r.size << "," << r.result.rescale_factor;
    for (double v : r.result.values) out << "," << v;
    out << "\n";
  }
  out.precision(old_precision);
}

}  // namespace hardedge
