#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <vector>

#include "hardedge/error.hpp"
#include "hardedge/hamiltonian.hpp"
#include "hardedge/potential.hpp"

using namespace hardedge;

namespace {

ScalingFunctions scaling(std::vector<double> g) { return ScalingFunctions(validate_potential(g)); }

// Reference values for g = [0.5, 0.125] from 30-digit adaptive quadrature. The root equation
// is t = phi^2 + 1.5 phi^4, so phi^2 = 2t / (1 + sqrt(1 + 6t)).
constexpr double kQuarticPhiHalf = 0.577350269189625764509;  // 1/sqrt(3)
constexpr double kQuarticKappa = 0.190032397181516766689;
constexpr double kQuarticThetaHalf = 0.450447163689521224744;
constexpr double kQuarticDphiHalf = 0.433012701892219323382;
constexpr double kQuarticD2phiHalf = -0.649519052838328985073;

}  // namespace

TEST_CASE("validation") {
  auto linear = validate_potential(std::vector<double>{0.5});
  CHECK(linear.convexity_margin() == doctest::Approx(1.0));
  CHECK(linear.is_laguerre());

  auto quartic = validate_potential(std::vector<double>{0.5, 0.125});
  CHECK(quartic.convexity_margin() == doctest::Approx(1.0));

  CHECK_THROWS_AS(validate_potential(std::vector<double>{-1.0, 1.0}), Error);
  try {
    validate_potential(std::vector<double>{-1.0, 1.0});
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NotUniformlyConvex);
  }
  try {
    validate_potential(std::vector<double>{});
    FAIL("expected EmptyPotential");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::EmptyPotential);
  }
  // trailing zeros are dropped
  CHECK(validate_potential(std::vector<double>{0.5, 0.0, 0.0}).degree() == 1);
  // negative intermediate coefficients are fine when the even extension stays convex
  CHECK_NOTHROW(validate_potential(std::vector<double>{1.0, -0.01, 0.01}));
}

TEST_CASE("linear potential closed forms") {
  auto sf = scaling({0.5});
  CHECK(sf.phi(0.25) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(sf.phi(0.0) == 0.0);
  CHECK(sf.kappa() == doctest::Approx(0.25).epsilon(1e-12));
  for (double t : {1e-6, 0.01, 0.3, 0.77, 1.0}) {
    CHECK(std::abs(sf.phi(t) - std::sqrt(t)) <= 1e-10);
    CHECK(std::abs(sf.theta(t) - t) <= 1e-10);
  }
  auto d = sf.phi_derivs(0.25);
  CHECK(d.first == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(d.second == doctest::Approx(-2.0).epsilon(1e-12));
  CHECK(sf.phi_derivs(1.0).first == doctest::Approx(0.5).epsilon(1e-12));
  CHECK_THROWS_AS(sf.phi(1.5), Error);
  CHECK_THROWS_AS(sf.phi_derivs(0.0), Error);
}

TEST_CASE("quartic potential reference values") {
  auto sf = scaling({0.5, 0.125});
  CHECK(sf.phi(0.5) == doctest::Approx(kQuarticPhiHalf).epsilon(1e-13));
  const double p = sf.phi(0.5);
  CHECK(std::abs(p * p + 1.5 * p * p * p * p - 0.5) <= 1e-14);
  CHECK(sf.kappa() == doctest::Approx(kQuarticKappa).epsilon(1e-11));
  CHECK(sf.theta(0.5) == doctest::Approx(kQuarticThetaHalf).epsilon(1e-10));
  auto d = sf.phi_derivs(0.5);
  CHECK(d.first == doctest::Approx(kQuarticDphiHalf).epsilon(1e-12));
  CHECK(d.second == doctest::Approx(kQuarticD2phiHalf).epsilon(1e-12));

  const double h = 1e-5;
  CHECK(std::abs((sf.phi(0.5 + h) - sf.phi(0.5 - h)) / (2 * h) - d.first) <= 1e-6 * d.first);
}

TEST_CASE("root residual, monotonicity and small-t scaling") {
  for (auto g : {std::vector<double>{0.5}, std::vector<double>{0.5, 0.125}, std::vector<double>{0.5, 0.0, 1.0 / 20.0},
                 std::vector<double>{1.0, -0.01, 0.01}}) {
    auto sf = scaling(g);
    CHECK(sf.theta(1.0) == 1.0);
    CHECK(std::abs(sf.kappa() * std::pow(sf.inverse_phi_integral(1.0), 2) - 1.0) <= 1e-12);
    double prev_phi = 0.0;
    double prev_theta = 0.0;
    for (int k = 1; k <= 1000; ++k) {
      const double t = k / 1000.0;
      const double p = sf.phi(t);
      CHECK(std::abs(t - sf.phi_equation(p)) <= 1e-10);
      CHECK(p > prev_phi);
      prev_phi = p;
      if (k % 25 == 0) {
        const double th = sf.theta(t);
        CHECK(th > prev_theta);
        prev_theta = th;
      }
    }
    for (double t : {1e-6, 1e-5, 1e-4, 1e-3, 1e-2}) {
      const double ratio = sf.phi(t) / std::sqrt(t);
      CHECK(ratio >= 0.1);
      CHECK(ratio <= 10.0);
    }
    for (double t : {0.05, 0.3, 0.9}) {
      const double h = 1e-6 * t;
      const double fd = (sf.phi(t + h) - sf.phi(t - h)) / (2 * h);
      CHECK(std::abs(fd - sf.phi_derivs(t).first) <= 1e-6 * std::abs(fd));
      const double fd2 = (sf.theta(t + 1e-4) - sf.theta(t - 1e-4)) / 2e-4;
      CHECK(std::abs(fd2 - sf.theta_prime(t)) <= 1e-6 * fd2);
    }
  }
}

TEST_CASE("fine correction arithmetic") {
  auto sf = scaling({0.5});
  auto c = sf.fine_correction(2.0, 0.0, 0.25);
  CHECK(c.x1 == doctest::Approx(-0.5).epsilon(1e-12));
  CHECK(c.y1 == doctest::Approx(-0.5).epsilon(1e-12));
  c = sf.fine_correction(1.0, 1.0, 1.0);
  CHECK(std::abs(c.x1) <= 1e-12);
  CHECK(c.y1 == doctest::Approx(-0.5).epsilon(1e-12));
  CHECK_THROWS_AS(sf.fine_correction(2.0, 0.0, 0.0), Error);

  // both defining relations hold at every evaluated t
  auto q = scaling({0.5, 0.125});
  for (double t : {0.01, 0.2, 0.6, 1.0}) {
    for (double beta : {1.0, 2.0, 4.0}) {
      const double a = 0.7;
      auto f = q.fine_correction(beta, a, t);
      const double dphi = q.phi_derivs(t).first;
      CHECK(f.x1 - f.y1 == doctest::Approx((a + 0.5) / q.inverse_phi_integral(t) - 0.5 * dphi).epsilon(1e-12));
      CHECK(f.x1 + f.y1 == doctest::Approx((a - 2.0 / beta) * dphi).epsilon(1e-12));
    }
  }
  // a + 1/2 = phi' I / 2 forces x1 = y1
  const double t = 0.4;
  const double a_eq = 0.5 * q.phi_derivs(t).first * q.inverse_phi_integral(t) - 0.5;
  auto f = q.fine_correction(2.0, a_eq, t);
  CHECK(std::abs(f.x1 - f.y1) <= 1e-12);
}

TEST_CASE("fine minimizer") {
  auto sf = scaling({0.5});
  auto fm = fine_minimizer(sf, 2.0, 0.0, 4);
  CHECK(fm.x.size() == 4);
  CHECK(fm.y.size() == 3);
  CHECK(fm.x[3] == doctest::Approx(1.0 + sf.fine_correction(2.0, 0.0, 1.0).x1 / 4.0));
  for (double v : fm.x) CHECK(v > 0.0);
  for (double v : fm.y) CHECK(v > 0.0);
  CHECK_THROWS_AS(fine_minimizer(sf, 2.0, 0.0, 1), Error);

  auto big = fine_minimizer(sf, 2.0, 0.0, 100000);
  CHECK(std::abs(big.x.back() - 1.0) < 1e-4);
}

TEST_CASE("fine minimizer is second-order close to the true minimizer for V = x/2") {
  // C from the bulk error at n = 1000 must still bound the error at n = 2000.
  auto worst_scaled = [](std::size_t n) {
    HamiltonianParams p{validate_potential(std::vector<double>{0.5}), 2.0, 0.0, n};
    auto fm = fine_minimizer(ScalingFunctions(p.potential), p.beta, p.a, n);
    auto mn = minimize(p);
    double worst = 0.0;
    for (std::size_t i = n / 10; i <= 9 * n / 10; ++i) {
      worst = std::max(worst, std::abs(fm.x[i - 1] - mn.x[i - 1]));
    }
    return worst * static_cast<double>(n * n);
  };
  const double c1000 = worst_scaled(1000);
  const double c2000 = worst_scaled(2000);
  CHECK(c1000 < 1.0);
  CHECK(c2000 <= 1.1 * c1000);
}
