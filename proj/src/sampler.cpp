#include "hardedge/sampler.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <istream>
#include <ostream>

#include "hardedge/error.hpp"

namespace hardedge {

namespace {

std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

constexpr double kAdaptationLow = 0.05;
constexpr double kAdaptationHigh = 0.95;

}  // namespace

std::uint64_t derive_stream_seed(std::uint64_t master_seed, std::uint64_t replica_index) {
  return splitmix64(master_seed + splitmix64(replica_index ^ 0x6a09e667f3bcc909ULL));
}

double chi_variate(double r, Rng& rng) {
  if (!(r > 0.0) || !std::isfinite(r)) throw Error(ErrorCode::NonPositiveParameter, "chi parameter must be positive");
  // libstdc++ uses Marsaglia-Tsang, boosted by U^(1/shape) for shape < 1.
  std::gamma_distribution<double> gamma(0.5 * r, 1.0);
  return std::sqrt(2.0 * gamma(rng));
}

BidiagonalSample sample_laguerre_exact(const HamiltonianParams& p, Rng& rng, std::uint64_t seed) {
  check_params(p);
  if (!p.potential.is_laguerre()) throw Error(ErrorCode::WrongPotential, "exact sampling needs V(x) = x/2");
  const double scale = 1.0 / std::sqrt(static_cast<double>(p.n) * p.beta);
  BidiagonalSample s;
  s.x.resize(p.n);
  s.y.resize(p.n - 1);
  for (std::size_t i = 1; i <= p.n; ++i) {
    s.x[i - 1] = scale * chi_variate(p.beta * (static_cast<double>(i) + p.a), rng);
    if (i < p.n) s.y[i - 1] = scale * chi_variate(p.beta * static_cast<double>(i), rng);
  }
  s.provenance = {Provenance::Kind::ExactChi, seed, 0.0, 0.0, 0};
  return s;
}

MalaChain::MalaChain(HamiltonianParams params, const ChainConfig& cfg)
    : params_(std::move(params)), cfg_(cfg), rng_(cfg.seed) {
  check_params(params_);
  const std::size_t n = params_.n;
  if (cfg_.burn_in == 0) cfg_.burn_in = 50 * n;
  if (cfg_.thin == 0) cfg_.thin = std::max<std::uint64_t>(1, n / 10);
  if (!(cfg_.target_accept > 0.0 && cfg_.target_accept < 1.0)) {
    throw Error(ErrorCode::InvalidParameters, "target acceptance must lie in (0,1)");
  }

  Bidiagonal start;
  if (n >= 2) {
    start = fine_minimizer(ScalingFunctions(params_.potential), params_.beta, params_.a, n);
  } else {
    start.x = {std::sqrt(std::max(log_coefficient_x(params_, 1), 0.1))};
  }
  z_ = interleave(start);
  const std::size_t nv = z_.size();

  // Diagonal stiffness of n beta H at the start; negative log coefficients count with |c|.
  const auto hess = hessian_hamiltonian(params_, start.x, start.y);
  precond_.resize(nv);
  const double nb = static_cast<double>(n) * params_.beta;
  for (std::size_t j = 0; j < nv; ++j) {
    const std::size_t site = j / 2 + 1;
    const double c = j % 2 == 0 ? log_coefficient_x(params_, site) : log_coefficient_y(params_, site);
    const double h = hess(j, j) + (std::abs(c) - c) / (z_[j] * z_[j]);
    precond_[j] = 1.0 / (nb * std::max(h, 1e-6));
  }

  grad_.resize(nv);
  trial_.resize(nv);
  trial_grad_.resize(nv);
  u_ = energy(z_, grad_);
  eps_ = cfg_.step_size > 0.0 ? cfg_.step_size : std::pow(static_cast<double>(nv), -1.0 / 6.0);
}

double MalaChain::energy(std::span<const double> z, std::span<double> grad) const {
  const double nb = static_cast<double>(params_.n) * params_.beta;
  const double h = energy_and_gradient(params_, z, grad);
  for (double& g : grad) g *= nb;
  return nb * h;
}

double MalaChain::log_proposal(std::span<const double> from, std::span<const double> grad_from,
                               std::span<const double> to) const {
  // log q(to | from) up to a constant: mean from - eps^2/2 P grad, covariance eps^2 P.
  double s = 0.0;
  const double half_eps2 = 0.5 * eps_ * eps_;
  for (std::size_t j = 0; j < from.size(); ++j) {
    const double r = to[j] - from[j] + half_eps2 * precond_[j] * grad_from[j];
    s += r * r / precond_[j];
  }
  return -s / (4.0 * half_eps2);
}

double MalaChain::log_acceptance_ratio(std::span<const double> from, std::span<const double> to) const {
  std::vector<double> gf(from.size());
  std::vector<double> gt(to.size());
  const double uf = energy(from, gf);
  const double ut = energy(to, gt);
  return (uf - ut) + log_proposal(to, gt, from) - log_proposal(from, gf, to);
}

bool MalaChain::step(bool adapt, std::uint64_t adapt_index) {
  const std::size_t nv = z_.size();
  const double half_eps2 = 0.5 * eps_ * eps_;
  bool inside = true;
  for (std::size_t j = 0; j < nv; ++j) {
    trial_[j] = z_[j] - half_eps2 * precond_[j] * grad_[j] + eps_ * std::sqrt(precond_[j]) * normal_(rng_);
    inside = inside && trial_[j] > 0.0;
  }
  double accept_prob = 0.0;
  bool accepted = false;
  if (inside) {
    const double ut = energy(trial_, trial_grad_);
    const double log_alpha = (u_ - ut) + log_proposal(trial_, trial_grad_, z_) - log_proposal(z_, grad_, trial_);
    accept_prob = std::isfinite(log_alpha) ? std::min(1.0, std::exp(log_alpha)) : 0.0;
    if (uniform_(rng_) < accept_prob) {
      z_.swap(trial_);
      grad_.swap(trial_grad_);
      u_ = ut;
      accepted = true;
    }
  } else {
    ++diag_.orthant_rejections;
  }
  if (adapt) {
    // Robbins-Monro on log step size.
    const double gain = std::pow(static_cast<double>(adapt_index) + 10.0, -0.6);
    eps_ *= std::exp(gain * (accept_prob - cfg_.target_accept));
  }
  ++diag_.steps;
  return accepted;
}

void MalaChain::burn_in() {
  if (burned_in_) return;
  const std::uint64_t late = cfg_.burn_in - cfg_.burn_in / 4;
  std::uint64_t late_accepted = 0;
  for (std::uint64_t s = 0; s < cfg_.burn_in; ++s) {
    const bool acc = step(true, s);
    if (s >= late) late_accepted += acc;
  }
  const std::uint64_t late_count = cfg_.burn_in - late;
  diag_.burn_in_acceptance = late_count ? static_cast<double>(late_accepted) / static_cast<double>(late_count) : 0.0;
  diag_.step_size = eps_;
  burned_in_ = true;
  if (late_count >= 20 &&
      (diag_.burn_in_acceptance < kAdaptationLow || diag_.burn_in_acceptance > kAdaptationHigh)) {
    throw Error(ErrorCode::AdaptationFailure,
                "acceptance " + std::to_string(diag_.burn_in_acceptance) + " after adaptation");
  }
}

BidiagonalSample MalaChain::next() {
  if (!burned_in_) burn_in();
  for (std::uint64_t s = 0; s < cfg_.thin; ++s) {
    accepted_ += step(false, 0);
    ++proposed_;
  }
  diag_.acceptance = static_cast<double>(accepted_) / static_cast<double>(proposed_);
  auto b = deinterleave(z_);
  BidiagonalSample out;
  out.x = std::move(b.x);
  out.y = std::move(b.y);
  out.provenance = {Provenance::Kind::Mcmc, cfg_.seed, eps_, diag_.acceptance, diag_.steps};
  return out;
}

std::vector<BidiagonalSample> sample_mcmc(const HamiltonianParams& p, const ChainConfig& cfg, std::size_t n_samples,
                                          ChainDiagnostics* diagnostics) {
  MalaChain chain(p, cfg);
  chain.burn_in();
  std::vector<BidiagonalSample> out;
  out.reserve(n_samples);
  for (std::size_t k = 0; k < n_samples; ++k) out.push_back(chain.next());
  if (diagnostics) *diagnostics = chain.diagnostics();
  return out;
}

// ---------------------------------------------------------------------------------------------
// Frames

namespace {

static_assert(std::endian::native == std::endian::little, "frames assume a little-endian host");

constexpr char kMagic[4] = {'H', 'E', 'B', 'S'};

template <class T>
void put(std::ostream& out, T v) {
  static_assert(sizeof(T) == 8 || sizeof(T) == 4);
  using U = std::conditional_t<sizeof(T) == 8, std::uint64_t, std::uint32_t>;
  U bits;
  std::memcpy(&bits, &v, sizeof(T));
  out.write(reinterpret_cast<const char*>(&bits), sizeof(U));
}

template <class T>
bool get(std::istream& in, T& v) {
  using U = std::conditional_t<sizeof(T) == 8, std::uint64_t, std::uint32_t>;
  U bits;
  if (!in.read(reinterpret_cast<char*>(&bits), sizeof(U))) return false;
  std::memcpy(&v, &bits, sizeof(T));
  return true;
}

}  // namespace

SampleHeader header_for(const HamiltonianParams& p, std::uint64_t seed) {
  const auto g = p.potential.coefficients();
  return {1, p.n, p.beta, p.a, std::vector<double>(g.begin(), g.end()), seed};
}

void write_samples_binary(std::ostream& out, const SampleHeader& h, std::span<const BidiagonalSample> samples) {
  out.write(kMagic, 4);
  put(out, h.version);
  put(out, h.n);
  put(out, h.beta);
  put(out, h.a);
  put(out, static_cast<std::uint64_t>(h.g.size()));
  for (double v : h.g) put(out, v);
  put(out, h.seed);
  for (const auto& s : samples) {
    if (s.x.size() != h.n || s.y.size() + 1 != h.n) throw Error(ErrorCode::FormatError, "sample size mismatch");
    for (double v : s.x) put(out, v);
    for (double v : s.y) put(out, v);
  }
}

std::vector<BidiagonalSample> read_samples_binary(std::istream& in, SampleHeader* header) {
  char magic[4];
  if (!in.read(magic, 4) || std::memcmp(magic, kMagic, 4) != 0) throw Error(ErrorCode::FormatError, "bad magic");
  SampleHeader h;
  std::uint64_t d = 0;
  if (!get(in, h.version) || h.version != 1) throw Error(ErrorCode::FormatError, "unsupported frame version");
  if (!get(in, h.n) || !get(in, h.beta) || !get(in, h.a) || !get(in, d) || d > 64 || h.n == 0) {
    throw Error(ErrorCode::FormatError, "truncated header");
  }
  h.g.resize(d);
  for (auto& v : h.g) {
    if (!get(in, v)) throw Error(ErrorCode::FormatError, "truncated header");
  }
  if (!get(in, h.seed)) throw Error(ErrorCode::FormatError, "truncated header");

  std::vector<BidiagonalSample> out;
  for (;;) {
    double first = 0.0;
    if (!get(in, first)) break;
    BidiagonalSample s;
    s.x.resize(h.n);
    s.y.resize(h.n - 1);
    s.x[0] = first;
    for (std::size_t i = 1; i < h.n; ++i) {
      if (!get(in, s.x[i])) throw Error(ErrorCode::FormatError, "truncated sample");
    }
    for (auto& v : s.y) {
      if (!get(in, v)) throw Error(ErrorCode::FormatError, "truncated sample");
    }
    s.provenance.seed = h.seed;
    out.push_back(std::move(s));
  }
  if (header) *header = h;
  return out;
}

void write_samples_csv(std::ostream& out, const SampleHeader& h, std::span<const BidiagonalSample> samples) {
  out << "# n=" << h.n << " beta=" << h.beta << " a=" << h.a << " g=";
  for (std::size_t m = 0; m < h.g.size(); ++m) out << (m ? ";" : "") << h.g[m];
  out << " seed=" << h.seed << "\n";
  for (std::size_t i = 1; i <= h.n; ++i) out << (i > 1 ? "," : "") << "x" << i;
  for (std::size_t i = 1; i < h.n; ++i) out << ",y" << i;
  out << "\n";
  const auto old_precision = out.precision(17);
  for (const auto& s : samples) {
    for (std::size_t i = 0; i < s.x.size(); ++i) out << (i ? "," : "") << s.x[i];
    for (double v : s.y) out << "," << v;
    out << "\n";
  }
  out.precision(old_precision);
}

}  // namespace hardedge
