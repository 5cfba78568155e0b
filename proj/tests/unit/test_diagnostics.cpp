// Apache License, Version 2.0, refer to LICENSE.txt

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "dpmix/diagnostics.hpp"
#include "dpmix/error.hpp"
#include "oracles.hpp"

using namespace dpmix;

TEST_CASE("iat of white noise and AR(1)") {
  RngStream rng(61, 0);
  std::vector<double> x(100000);
  for (double& v : x) v = rng.normal();
  const IatEstimate e = iat(x);
  CHECK(e.tau > 0.45);
  CHECK(e.tau < 0.55);
  CHECK_FALSE(e.truncated);
  CHECK(static_cast<double>(e.window) >= 10.0 * e.tau);

  std::vector<double> ar(1000000);
  double prev = rng.normal() / std::sqrt(0.75);
  for (double& v : ar) {
    prev = 0.5 * prev + rng.normal();
    v = prev;
  }
  const double tau = iat(ar).tau;
  CHECK(tau > 1.4);
  CHECK(tau < 1.6);
}

TEST_CASE("iat edge cases") {
  std::vector<double> alt(1000);
  for (std::size_t i = 0; i < alt.size(); ++i) alt[i] = (i % 2) ? 1.0 : -1.0;
  CHECK(iat(alt).tau == doctest::Approx(0.0).epsilon(1e-12));
  CHECK_THROWS_AS((iat(std::vector<double>(10, 3.0))), Error);
  CHECK_THROWS_AS((iat(std::vector<double>{1.0})), Error);

  // with 1/N autocovariances the lag sum telescopes to zero at lag N - 1, so the
  // window rule fires on every finite non-constant series
  RngStream rng(60, 0);
  for (int rep = 0; rep < 200; ++rep) {
    std::vector<double> walk(2 + rep);
    double x = 0.0;
    for (double& v : walk) v = (x += rng.normal());
    const IatEstimate r = iat(walk);
    REQUIRE(r.window <= walk.size() - 1);
    REQUIRE_FALSE(r.truncated);
  }
}

TEST_CASE("iat calibration over replicates") {
  RngStream rng(62, 0);
  int inside = 0;
  const int reps = 100;
  std::vector<double> x(100000);
  for (int rep = 0; rep < reps; ++rep) {
    for (double& v : x) v = rng.uniform();
    const double t = iat(x).tau;
    inside += t >= 0.4 && t <= 0.6;
  }
  CHECK(inside >= 99);
}

TEST_CASE("ess") {
  const double ninf = -std::numeric_limits<double>::infinity();
  CHECK(ess(std::vector<double>(50, -3.2)) == doctest::Approx(50.0));
  std::vector<double> one(1000, ninf);
  one[17] = 0.0;
  CHECK(ess(one) == doctest::Approx(1.0));
  CHECK_THROWS_AS((ess(std::vector<double>(5, ninf))), Error);

  std::vector<double> lw{0.1, -2.0, 1.3, 0.0, -0.5};
  const double base = ess(lw);
  std::vector<double> shifted = lw;
  for (double& v : shifted) v += 700.0;
  std::vector<double> perm{lw[3], lw[0], lw[4], lw[2], lw[1]};
  CHECK(ess(shifted) == doctest::Approx(base));
  CHECK(ess(perm) == doctest::Approx(base));
  // direct evaluation
  double s = 0.0, s2 = 0.0;
  for (double v : lw) {
    s += std::exp(v);
    s2 += std::exp(2 * v);
  }
  const double var = 5.0 * s2 / (s * s) - 1.0;
  CHECK(base == doctest::Approx(5.0 / (1.0 + var)));
}

TEST_CASE("deviance") {
  const ModelSpec m1{1.0, 1.0, 1.0, 1};
  const Dataset d{1, {1, 0}};
  CHECK(deviance(d, std::vector<int>{2}, std::vector<double>{0.5}, m1) ==
        doctest::Approx(-4.0 * std::log(0.5)));

  const ModelSpec m9{1.0, 1.0, 1.0, 9};
  const Dataset single{9, {3}};
  CHECK(deviance(single, std::vector<int>{1}, std::vector<double>{0.2}, m9) ==
        doctest::Approx(-2.0 * std::log(oracle::binomial_pmf(3, 9, 0.2))));

  const Dataset d3{9, {3, 4, 8}};
  const double merged = deviance(d3, std::vector<int>{3}, std::vector<double>{0.4}, m9);
  const double split = deviance(d3, std::vector<int>{1, 2}, std::vector<double>{0.4, 0.4}, m9);
  CHECK(merged == doctest::Approx(split));

  // moving a single atom toward the empirical rate lowers D
  const double rate = 15.0 / 27.0;
  CHECK(deviance(d3, std::vector<int>{3}, std::vector<double>{rate}, m9) <
        deviance(d3, std::vector<int>{3}, std::vector<double>{0.3}, m9));

  CHECK_THROWS_AS((deviance(d3, std::vector<int>{3}, std::vector<double>{1.0}, m9)), Error);
  CHECK_THROWS_AS((deviance(d3, std::vector<int>{3}, std::vector<double>{0.0}, m9)), Error);
}

TEST_CASE("functionals from an augmented draw") {
  AugmentedDraw a;
  a.s = OoaLabels({1, 1, 2});
  a.theta = {0.4, 0.4, 0.9};
  a.trans.r = SbLabels({2, 2, 1});
  a.trans.w_prefix = WeightState({0.3, 0.5}, 0.2, WeightOrder::stick);
  a.m = {0.9, 0.4};
  const Dataset d{1, {1, 1, 0}};
  const ModelSpec m{1.0, 1.0, 1.0, 1};
  const Functionals f = extract_functionals(a, d, m);
  CHECK(f.K == 2);
  CHECK(f.r1 == 2);
  CHECK(f.w1 == 0.3);
  CHECK(f.m1 == 0.9);
  CHECK(f.w_r1 == 0.5);
  CHECK(f.theta1 == 0.4);
  CHECK(f.D == doctest::Approx(deviance(d, std::vector<int>{2, 1}, std::vector<double>{0.4, 0.9}, m)));
}

TEST_CASE("functionals from a slice state") {
  SliceState st;
  st.r = SbLabels({3, 3, 1});
  st.v = BreakFractions{{0.5, 0.5, 0.5}};
  st.w = weights_from_breaks(st.v, WeightOrder::stick);
  st.m = {0.2, 0.5, 0.7};
  const Dataset d{1, {1, 1, 0}};
  const ModelSpec m{1.0, 1.0, 1.0, 1};
  const Functionals f = extract_functionals(st, d, m);
  CHECK(f.K == 2);
  CHECK(f.r1 == 3);
  CHECK(f.theta1 == 0.7);
  CHECK(f.w_r1 == 0.125);
  CHECK(f.w1 == 0.5);
  CHECK(f.m1 == 0.2);
}

TEST_CASE("two-sample tests") {
  RngStream rng(63, 0);
  std::vector<double> a(5000), b(5000), c(5000);
  for (double& v : a) v = rng.uniform();
  for (double& v : b) v = rng.uniform();
  for (double& v : c) v = std::pow(rng.uniform(), 1.3);
  CHECK(ks_two_sample(a, b).p_value > 0.01);
  CHECK(ks_two_sample(a, c).p_value < 1e-6);
  CHECK(kolmogorov_q(0.0) == 1.0);
  // Q(1.36) is the classic 5% point
  CHECK(kolmogorov_q(1.3581) == doctest::Approx(0.05).epsilon(1e-3));

  const std::vector<double> x{100, 200, 300}, y{110, 190, 300}, z{300, 200, 100};
  CHECK(chi_square_two_sample(x, y).p_value > 0.1);
  CHECK(chi_square_two_sample(x, z).p_value < 1e-10);
}
