#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "alphasign/distributions.hpp"
#include "alphasign/rng.hpp"

using namespace alphasign;

TEST_CASE("gumbel G closed-form points") {
  // G(-ln pi) = exp(-pi^{-1/2} e^{(ln pi)/2}) = exp(-1)
  CHECK(gumbel_g_cdf(-std::log(M_PI)) == doctest::Approx(std::exp(-1.0)).epsilon(1e-12));
  CHECK(gumbel_g_cdf(4.7957) == doctest::Approx(0.95).epsilon(1e-4));
  CHECK(gumbel_g_cdf(80.0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(gumbel_g_cdf(-60.0) == doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("gumbel G max-stability") {
  // G(x)^2 = G(x - 2 ln 2)
  for (double x : {-1.0, 0.0, 1.5, 3.0, 7.0}) {
    double lhs = gumbel_g_cdf(x) * gumbel_g_cdf(x);
    CHECK(lhs == doctest::Approx(gumbel_g_cdf(x - 2.0 * std::log(2.0))).epsilon(1e-12));
  }
}

TEST_CASE("gumbel quantile inverts the cdf") {
  CHECK(gumbel_g_quantile(std::exp(-1.0)) == doctest::Approx(-std::log(M_PI)).epsilon(1e-12));
  CHECK(gumbel_g_quantile(0.95) == doctest::Approx(4.7957).epsilon(1e-4));
  for (double q : {0.01, 0.1, 0.5, 0.9, 0.99, 0.999}) {
    CHECK(gumbel_g_cdf(gumbel_g_quantile(q)) == doctest::Approx(q).epsilon(1e-12));
  }
}

TEST_CASE("gumbel G is monotone") {
  double prev = -1.0;
  for (double x = -6.0; x <= 12.0; x += 0.25) {
    double g = gumbel_g_cdf(x);
    CHECK(g >= prev);
    CHECK(g >= 0.0);
    CHECK(g <= 1.0);
    prev = g;
  }
}

TEST_CASE("standard normal cdf") {
  CHECK(std_normal_cdf(0.0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(std_normal_cdf(1.959963984540054) == doctest::Approx(0.975).epsilon(1e-12));
  for (double x : {-3.0, -0.7, 0.3, 2.5}) {
    CHECK(std_normal_cdf(-x) == doctest::Approx(1.0 - std_normal_cdf(x)).epsilon(1e-14));
  }
}

TEST_CASE("standard normal quantile roundtrip") {
  CHECK(std::abs(std_normal_quantile(0.5)) <= 1e-12);
  CHECK(std_normal_quantile(0.975) == doctest::Approx(1.959963984540054).epsilon(1e-9));
  for (double q : {1e-6, 0.01, 0.05, 0.3, 0.5, 0.8, 0.95, 0.999}) {
    CHECK(std_normal_cdf(std_normal_quantile(q)) == doctest::Approx(q).epsilon(1e-11));
  }
}

TEST_CASE("cauchy cdf") {
  CHECK(cauchy_cdf(0.0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(cauchy_cdf(1.0) == doctest::Approx(0.75).epsilon(1e-12));
  CHECK(cauchy_cdf(-1.0) == doctest::Approx(0.25).epsilon(1e-12));
  // tail identity: 1 - F(tan((0.5 - p) pi)) = p
  for (double p : {0.01, 0.05, 0.2}) {
    double x = std::tan((0.5 - p) * M_PI);
    CHECK(1.0 - cauchy_cdf(x) == doctest::Approx(p).epsilon(1e-10));
  }
}

TEST_CASE("regularized incomplete beta symmetry") {
  for (double a : {0.5, 1.5, 4.0}) {
    for (double b : {1.0, 2.5, 30.0}) {
      for (double x : {0.05, 0.4, 0.9}) {
        CHECK(reg_inc_beta(a, b, x) + reg_inc_beta(b, a, 1.0 - x) ==
              doctest::Approx(1.0).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("F cdf fixed points") {
  // F(1,1) has median 1
  CHECK(f_cdf(1.0, 1.0, 1.0) == doctest::Approx(0.5).epsilon(1e-10));
  CHECK(f_cdf(0.0, 3.0, 10.0) == doctest::Approx(0.0).epsilon(1e-15));
  double prev = 0.0;
  for (double x = 0.0; x <= 8.0; x += 0.2) {
    double v = f_cdf(x, 4.0, 17.0);
    CHECK(v >= prev);
    prev = v;
  }
}

TEST_CASE("F cdf against Monte Carlo draws") {
  const int d1 = 3, d2 = 60, n = 100000;
  Rng rng(20240811);
  std::vector<double> draws(n);
  for (int i = 0; i < n; ++i) {
    double num = rng.chi_squared(d1) / d1;
    double den = rng.chi_squared(d2) / d2;
    draws[i] = num / den;
  }
  std::sort(draws.begin(), draws.end());
  double ks = 0.0;
  for (int i = 0; i < n; ++i) {
    double theo = f_cdf(draws[i], d1, d2);
    double lo = static_cast<double>(i) / n;
    double hi = static_cast<double>(i + 1) / n;
    ks = std::max(ks, std::max(std::abs(theo - lo), std::abs(theo - hi)));
  }
  CHECK(ks <= 0.01);
}
