// Command-line front end: deterministic tables, sampling, spectra and the experiments.
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>

#include "CLI11.hpp"
#include "hardedge/config.hpp"
#include "hardedge/error.hpp"
#include "hardedge/experiments.hpp"
#include "hardedge/hamiltonian.hpp"
#include "hardedge/sampler.hpp"
#include "hardedge/spectra.hpp"

using namespace hardedge;

namespace {

constexpr int kExitConfig = 1;
constexpr int kExitNumerical = 2;
constexpr int kExitStatistical = 3;

struct EnsembleArgs {
  std::vector<double> potential{0.5};
  double beta = 2.0;
  double a = 0.0;
  std::size_t n = 100;
};

void add_ensemble(CLI::App* cmd, EnsembleArgs& e) {
  cmd->add_option("--potential", e.potential, "coefficients g_1..g_d of V(x) = sum g_m x^m")->expected(1, -1);
  cmd->add_option("--beta", e.beta, "inverse temperature, >= 1");
  cmd->add_option("-a", e.a, "hard-edge exponent, > -1");
  cmd->add_option("-n,--n", e.n, "matrix size");
}

HamiltonianParams params(const EnsembleArgs& e) { return {validate_potential(e.potential), e.beta, e.a, e.n}; }

// Writes to `path`, or stdout when empty.
template <class F>
void with_output(const std::string& path, bool binary, F&& body) {
  if (path.empty()) {
    body(std::cout);
    return;
  }
  if (auto dir = std::filesystem::path(path).parent_path(); !dir.empty()) std::filesystem::create_directories(dir);
  std::ofstream out(path, binary ? std::ios::binary : std::ios::out);
  if (!out) throw Error(ErrorCode::ConfigError, "cannot write " + path);
  body(out);
}

int cmd_phi(const std::vector<double>& g, std::size_t grid, const std::string& out) {
  if (grid < 2) throw Error(ErrorCode::ConfigError, "--grid must be >= 2");
  const ScalingFunctions sf(validate_potential(g));
  with_output(out, false, [&](std::ostream& os) {
    os.precision(17);
    os << "# kappa=" << sf.kappa() << " hard_edge_constant=" << sf.hard_edge_constant() << "\n";
    os << "t,phi,theta,theta_prime\n";
    for (std::size_t i = 0; i < grid; ++i) {
      const double t = static_cast<double>(i) / static_cast<double>(grid - 1);
      os << t << "," << sf.phi(t) << "," << sf.theta(t) << ",";
      if (t > 0.0) os << sf.theta_prime(t);  // theta' is defined on (0, 1]
      os << "\n";
    }
  });
  return 0;
}

int cmd_minimize(const EnsembleArgs& e, const std::string& out) {
  const auto p = params(e);
  const auto m = minimize(p);
  with_output(out, false, [&](std::ostream& os) {
    os.precision(17);
    os << "# iterations=" << m.iterations << " grad_norm=" << m.grad_norm << " pinned=" << m.pinned << "\n";
    os << "k,x,y\n";
    for (std::size_t k = 0; k < e.n; ++k) {
      os << k + 1 << "," << m.x[k] << ",";
      if (k + 1 < e.n) os << m.y[k];
      os << "\n";
    }
  });
  return 0;
}

int cmd_sample(const EnsembleArgs& e, std::size_t count, std::uint64_t seed, const std::string& sampler,
               const std::string& format, const std::string& out) {
  const auto p = params(e);
  ExperimentConfig cfg;
  cfg.sampler = sampler;
  validate_config(cfg);
  const auto samples = draw_samples(p, count, plan_for(cfg, p.potential), seed);
  const auto header = header_for(p, seed);
  if (format == "binary") {
    if (out.empty()) throw Error(ErrorCode::ConfigError, "binary output needs --out");
    with_output(out, true, [&](std::ostream& os) { write_samples_binary(os, header, samples); });
  } else {
    with_output(out, false, [&](std::ostream& os) { write_samples_csv(os, header, samples); });
  }
  return 0;
}

int cmd_spectrum(const std::string& input, int k, const std::string& solver, bool rescale, const std::string& out) {
  std::ifstream in(input, std::ios::binary);
  if (!in) throw Error(ErrorCode::ConfigError, "cannot read " + input);
  SampleHeader header;
  const auto samples = read_samples_binary(in, &header);
  std::vector<SpectrumRow> rows;
  std::optional<ScalingFunctions> sf;
  if (rescale) sf.emplace(validate_potential(header.g));
  for (std::size_t i = 0; i < samples.size(); ++i) {
    SpectrumResult r = solver == "sturm" ? sturm_eigs(samples[i], k) : smallest_eigs(samples[i], k);
    for (const auto& w : r.warnings) std::cerr << "warning: sample " << i << ": " << w << "\n";
    if (rescale) r = rescale_hard_edge(r, sf->kappa(), header.n);
    rows.push_back({derive_stream_seed(header.seed, i), header.n, r});
  }
  std::string desc = "n=" + std::to_string(header.n) + " beta=" + std::to_string(header.beta) +
                     " a=" + std::to_string(header.a) + " solver=" + solver;
  with_output(out, false, [&](std::ostream& os) { write_spectra_csv(os, desc, rows); });
  return 0;
}

int cmd_sbo(std::size_t cells, double eps, double beta, double a, std::size_t replicas, int k, std::uint64_t seed,
            const std::string& out) {
  const SboModel model(make_sbo_grid(cells, eps, beta, a, SboMode::Native));
  const auto res = sbo_spectra(model, replicas, k, seed);
  std::vector<SpectrumRow> rows;
  for (std::size_t i = 0; i < res.size(); ++i) rows.push_back({derive_stream_seed(seed, i), cells, res[i]});
  const std::string desc = "SBO native M=" + std::to_string(cells) + " eps=" + std::to_string(eps) +
                           " beta=" + std::to_string(beta) + " a=" + std::to_string(a);
  with_output(out, false, [&](std::ostream& os) { write_spectra_csv(os, desc, rows); });
  return 0;
}

ExperimentConfig load_config(const std::string& path, const std::vector<std::string>& overrides,
                             const std::string& experiment) {
  ExperimentConfig cfg;
  cfg.experiment = experiment;
  if (!path.empty()) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::ConfigError, "cannot read " + path);
    apply_config_text(cfg, in, path);
  }
  for (const auto& o : overrides) apply_override(cfg, o);
  if (cfg.experiment != experiment) {
    throw Error(ErrorCode::ConfigError, "config selects '" + cfg.experiment + "' but the command is '" + experiment + "'");
  }
  validate_config(cfg);
  return cfg;
}

int finish(const ExperimentConfig& cfg, const Json& report) {
  const std::string text = report.dump(2) + "\n";
  if (!cfg.output_dir.empty()) {
    std::filesystem::create_directories(cfg.output_dir);
    std::ofstream(std::filesystem::path(cfg.output_dir) / (cfg.experiment + ".json")) << text;
    std::ofstream(std::filesystem::path(cfg.output_dir) / "manifest.json") << run_manifest(cfg).dump(2) << "\n";
  }
  std::cout << text;
  const bool passed = report["passed"].get<bool>();
  const bool controls = report["controls_passed"].get<bool>();
  if (!controls) std::cerr << cfg.experiment << ": split-half control failed; the run is invalid\n";
  if (!passed) std::cerr << cfg.experiment << ": check failed\n";
  return passed && controls ? 0 : kExitStatistical;
}

int cmd_experiment(const std::string& experiment, const std::string& path, const std::vector<std::string>& overrides) {
  const auto cfg = load_config(path, overrides, experiment);
  if (experiment == "universality") {
    const auto r = run_universality(cfg);
    return finish(cfg, report_json(cfg, experiment, r.passed, r.controls_passed, to_json(r)));
  }
  CheckReport r;
  if (experiment == "mean-check") r = run_mean_check(cfg);
  if (experiment == "var-check") r = run_variance_check(cfg);
  if (experiment == "clt-check") r = run_clt_check(cfg);
  return finish(cfg, report_json(cfg, experiment, r.passed, r.controls_passed, r.body));
}

// Deterministic oracles only; no sampling beyond fixed-seed single draws.
int cmd_selftest() {
  int failures = 0;
  auto check = [&](const std::string& name, bool ok, double value) {
    std::cout << (ok ? "ok   " : "FAIL ") << name << " (" << value << ")\n";
    failures += !ok;
  };
  {
    const ScalingFunctions lin(validate_potential(std::vector<double>{0.5}));
    double worst = std::abs(lin.kappa() - 0.25);
    for (int i = 0; i <= 100; ++i) {
      const double t = i / 100.0;
      worst = std::max({worst, std::abs(lin.phi(t) - std::sqrt(t)), std::abs(lin.theta(t) - t)});
    }
    check("linear scaling functions", worst <= 1e-10, worst);
    const ScalingFunctions quartic(validate_potential(std::vector<double>{0.5, 0.125}));
    const double e = std::abs(quartic.phi(0.5) - 1.0 / std::sqrt(3.0));
    check("quartic phi(0.5) = 1/sqrt(3)", e <= 1e-12, e);
    const double ek = std::abs(quartic.kappa() - 0.190032397181516766689);
    check("quartic kappa", ek <= 1e-10, ek);
  }
  {
    bool same = true;
    for (int m = 1; m <= 5; ++m) same = same && lattice_enumerate(m) == lattice_coefficients(m);
    check("lattice enumeration equals closed forms, m = 1..5", same, 5);
  }
  {
    const std::size_t n = 50;
    const HamiltonianParams p{validate_potential(std::vector<double>{0.5}), 2.0, 0.5, n};
    const auto m = minimize(p);
    double worst = 0.0;
    for (std::size_t k = 1; k <= n; ++k) {
      worst = std::max(worst, std::abs(m.x[k - 1] - std::sqrt((k + 0.5 - 0.5) / n)));
      if (k < n) worst = std::max(worst, std::abs(m.y[k - 1] - std::sqrt((k - 0.5) / n)));
    }
    check("linear minimizer closed form", worst <= 1e-10, worst);
  }
  {
    Rng rng(1);
    const HamiltonianParams p{validate_potential(std::vector<double>{0.5}), 2.0, 0.0, 300};
    const auto s = sample_laguerre_exact(p, rng);
    const auto a = smallest_eigs(s, 3);
    const auto b = sturm_eigs(s, 3);
    double worst = 0.0;
    for (int r = 0; r < 3; ++r) worst = std::max(worst, std::abs(a.values[r] / b.values[r] - 1.0));
    check("Lanczos against Sturm bisection", worst <= 1e-6, worst);
  }
  {
    const SboModel model(make_sbo_grid(1000, 1e-6, 2.0, 0.0, SboMode::Native));
    const double l1 = model.spectrum(std::vector<double>(1000, 0.0), 1).values[0];
    const double j01 = 2.404825557695773;
    const double e = std::abs(l1 / (j01 * j01 / 4.0) - 1.0);
    check("zero-noise SBO Lambda_1 = j_{0,1}^2/4", e <= 1e-4, e);
  }
  return failures == 0 ? 0 : kExitNumerical;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hard-edge universality laboratory for beta-ensembles with polynomial potentials"};
  app.require_subcommand(1);

  std::string out;
  EnsembleArgs ens;

  std::vector<double> phi_potential{0.5};
  std::size_t grid = 101;
  auto* phi = app.add_subcommand("phi", "tabulate phi, theta and theta' on a uniform grid");
  phi->add_option("--potential", phi_potential, "coefficients g_1..g_d")->expected(1, -1);
  phi->add_option("--grid", grid, "number of grid points on [0, 1]");
  phi->add_option("--out", out, "CSV file (default stdout)");

  auto* mini = app.add_subcommand("minimize", "minimizer of the Hamiltonian");
  add_ensemble(mini, ens);
  mini->add_option("--out", out, "CSV file (default stdout)");

  std::size_t count = 1;
  std::uint64_t seed = 1;
  std::string sampler = "auto";
  std::string format = "csv";
  auto* sample = app.add_subcommand("sample", "draw bidiagonal samples");
  add_ensemble(sample, ens);
  sample->add_option("--count", count, "number of samples");
  sample->add_option("--seed", seed, "master seed");
  sample->add_option("--sampler", sampler, "auto, exact or mcmc")->check(CLI::IsMember({"auto", "exact", "mcmc"}));
  sample->add_option("--format", format, "csv or binary")->check(CLI::IsMember({"csv", "binary"}));
  sample->add_option("--out", out, "output file");

  std::string input;
  int k = 4;
  std::string solver = "lanczos";
  bool rescale = false;
  auto* spectrum = app.add_subcommand("spectrum", "smallest eigenvalues of stored samples");
  spectrum->add_option("--input", input, "binary sample file")->required();
  spectrum->add_option("-k", k, "number of eigenvalues");
  spectrum->add_option("--solver", solver, "lanczos or sturm")->check(CLI::IsMember({"lanczos", "sturm"}));
  spectrum->add_flag("--rescale", rescale, "report n^2 lambda / (4 kappa)");
  spectrum->add_option("--out", out, "CSV file (default stdout)");

  std::size_t cells = 2000;
  double eps = 1e-6;
  double sbo_beta = 2.0;
  double sbo_a = 0.0;
  std::size_t replicas = 100;
  auto* sbo = app.add_subcommand("sbo", "Monte-Carlo eigenvalues of the stochastic Bessel operator");
  sbo->add_option("--cells", cells, "grid cells M");
  sbo->add_option("--eps", eps, "singularity cutoff");
  sbo->add_option("--beta", sbo_beta, "beta");
  sbo->add_option("-a", sbo_a, "hard-edge exponent");
  sbo->add_option("--replicas", replicas, "number of draws");
  sbo->add_option("-k", k, "number of eigenvalues");
  sbo->add_option("--seed", seed, "master seed");
  sbo->add_option("--out", out, "CSV file (default stdout)");

  std::string config_path;
  std::vector<std::string> overrides;
  std::vector<std::pair<std::string, CLI::App*>> experiments;
  for (const char* name : {"universality", "mean-check", "var-check", "clt-check"}) {
    auto* cmd = app.add_subcommand(name, std::string("run the ") + name + " experiment");
    cmd->add_option("--config", config_path, "config file of key = value lines");
    cmd->add_option("--set", overrides, "override, key=value (repeatable)");
    experiments.emplace_back(name, cmd);
  }

  auto* selftest = app.add_subcommand("selftest", "run the deterministic oracles");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (*phi) return cmd_phi(phi_potential, grid, out);
    if (*mini) return cmd_minimize(ens, out);
    if (*sample) return cmd_sample(ens, count, seed, sampler, format, out);
    if (*spectrum) return cmd_spectrum(input, k, solver, rescale, out);
    if (*sbo) return cmd_sbo(cells, eps, sbo_beta, sbo_a, replicas, k, seed, out);
    if (*selftest) return cmd_selftest();
    for (const auto& [name, cmd] : experiments) {
      if (*cmd) return cmd_experiment(name, config_path, overrides);
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.category() == ErrorCategory::Config ? kExitConfig : kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumerical;
  }
  return kExitConfig;
}
