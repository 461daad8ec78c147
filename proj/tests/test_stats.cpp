#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>
#include <vector>

#include "hardedge/error.hpp"
#include "hardedge/stats.hpp"

using namespace hardedge;

TEST_CASE("ks statistic on small samples") {
  const std::vector<double> a{1, 2, 3}, b{1.5, 2.5, 3.5};
  CHECK(ks_statistic(a, a) == 0.0);
  CHECK(ks_statistic(a, std::vector<double>{10, 11}) == 1.0);
  CHECK(ks_statistic(a, b) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  CHECK(ks_statistic(b, a) == ks_statistic(a, b));
}

TEST_CASE("ks statistic with ties") {
  const std::vector<double> a{1, 1, 2, 2}, b{1, 2, 2, 2};
  CHECK(ks_statistic(a, b) == doctest::Approx(0.25).epsilon(1e-15));
}

TEST_CASE("ks statistic rejects empty samples") {
  const std::vector<double> a{1.0}, none;
  try {
    (void)ks_statistic(a, none);
    FAIL("expected Empty");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::Empty);
  }
  CHECK_THROWS_AS((void)ks_normal(none), Error);
}

TEST_CASE("ks critical value") {
  // sqrt(-log(0.025)/2) = 1.3581 at alpha = 0.05
  CHECK(ks_critical(1000, 1000, 0.05) == doctest::Approx(1.358102 * std::sqrt(2.0 / 1000)).epsilon(1e-5));
}

TEST_CASE("split-half rejection rate is nominal on iid normals") {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> z;
  int rejects = 0;
  const int trials = 400;
  for (int t = 0; t < trials; ++t) {
    std::vector<double> v(1000);
    for (double& x : v) x = z(rng);
    rejects += split_half_ks(v) > ks_critical(500, 500, 0.05);
  }
  // Binomial(400, <=0.05): mean 20, sd 4.4
  CHECK(rejects <= 35);
}

TEST_CASE("ks normal on normal draws") {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> z;
  std::vector<double> v(20000);
  for (double& x : v) x = z(rng);
  CHECK(ks_normal(v) < 0.015);
  for (double& x : v) x += 0.1;
  CHECK(ks_normal(v) > 0.03);
}

TEST_CASE("bootstrap band brackets the observed distance") {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> z;
  std::vector<double> a(500), b(500);
  for (double& x : a) x = z(rng);
  for (double& x : b) x = z(rng) + 0.3;
  const double ks = ks_statistic(a, b);
  const Band band = bootstrap_ks_band(a, b, 200, 9);
  CHECK(band.lo <= ks);
  CHECK(band.hi >= ks);
  const Band again = bootstrap_ks_band(a, b, 200, 9);
  CHECK(again.lo == band.lo);
  CHECK(again.hi == band.hi);
}

TEST_CASE("moments") {
  const std::vector<double> a{1, 2, 3, 4}, b{2, 4, 6, 8};
  CHECK(mean(a) == 2.5);
  CHECK(variance(a) == doctest::Approx(5.0 / 3.0));
  CHECK(covariance(a, b) == doctest::Approx(10.0 / 3.0));
  CHECK(correlation(a, b) == doctest::Approx(1.0));
}

TEST_CASE("exponential decay fit") {
  std::vector<double> d, r;
  for (int i = 0; i < 10; ++i) {
    d.push_back(i);
    r.push_back(3.0 * std::exp(-i / 2.5));
  }
  r.push_back(1e-20);
  d.push_back(10);
  const DecayFit f = fit_exponential_decay(d, r, 1e-13);
  CHECK(f.points == 10);
  CHECK(f.length == doctest::Approx(2.5).epsilon(1e-12));
  CHECK(std::exp(f.intercept) == doctest::Approx(3.0).epsilon(1e-12));
}
