#include "fdpenv/numerics.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>
#include <vector>

#include "doctest.h"

using namespace fdpenv;

namespace {

// Independent bisection oracle for h^{-1}, using only the defining formula.
double hinv_bisect(double y) {
  long double lo = 1.0L, hi = 4.0L;
  const auto h = [](long double lam) { return lam * (std::log(lam) - 1.0L) + 1.0L; };
  while (h(hi) < y) hi *= 2.0L;
  for (int i = 0; i < 200; ++i) {
    const long double mid = 0.5L * (lo + hi);
    if (h(mid) < y) lo = mid; else hi = mid;
  }
  return static_cast<double>(0.5L * (lo + hi));
}

// Simpson quadrature of the normal density on [z, z+40], an oracle for the
// upper tail that shares no code with the implementation.
double upper_tail_quadrature(double z) {
  const double a = z, b = z + 40.0;
  const int n = 40000;  // even
  const double h = (b - a) / n;
  const auto phi = [](double x) {
    return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
  };
  double acc = phi(a) + phi(b);
  for (int i = 1; i < n; ++i) acc += phi(a + i * h) * (i % 2 ? 4.0 : 2.0);
  return acc * h / 3.0;
}

}  // namespace

TEST_CASE("h_eval matches the defining formula") {
  CHECK(h_eval(std::numbers::e) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(h_eval(2.0) == doctest::Approx(0.38629436111989062).epsilon(1e-14));
  // continuity at the boundary: h(1+eps) -> 0
  CHECK(h_eval(1.0 + 1e-6) < 1e-11);
  CHECK(h_eval(1.0 + 1e-9) < 1e-17);
  CHECK_THROWS_AS(h_eval(1.0), std::domain_error);
  CHECK_THROWS_AS(h_eval(0.5), std::domain_error);
}

TEST_CASE("h_inverse against the bisection oracle and spec points") {
  CHECK(h_inverse(1.0) == doctest::Approx(std::numbers::e).epsilon(1e-12));
  CHECK(h_inverse(0.38629436111989062) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(h_inverse(1.190360) == doctest::Approx(2.902).epsilon(1e-3));
  for (double y : {1e-6, 3.7e-3, 0.39, 1.19, 17.0, 4.2e3, 9.9e5}) {
    CHECK(h_inverse(y) == doctest::Approx(hinv_bisect(y)).epsilon(1e-10));
  }
  CHECK_THROWS_AS(h_inverse(0.0), std::domain_error);
  CHECK_THROWS_AS(h_inverse(-1.0), std::domain_error);
}

TEST_CASE("h_inverse residual and sandwich bounds on a log grid") {
  // also exercised at acceptance scale; here a coarse grid plus the extended
  // range the spec requires to converge
  for (int i = 0; i <= 48; ++i) {
    const double y = std::pow(10.0, -12.0 + 0.5 * i);  // 1e-12 .. 1e12
    const double lam = h_inverse(y);
    CHECK(lam >= (1.0 + std::sqrt(2.0 * y)) * (1.0 - 1e-12));
    const double upper = 1.0 + std::sqrt(0.5 * y);
    CHECK(lam <= upper * upper * (1.0 + 1e-12));
    CHECK(std::abs(h_eval(lam) - y) <= 1e-12 * std::max(1.0, y));
  }
}

TEST_CASE("x * h_inverse(c/x) is nondecreasing in x") {
  for (double c : {0.1, 1.0, 10.0}) {
    double prev = 0.0;
    for (int i = 0; i <= 90; ++i) {
      const double x = std::pow(10.0, -3.0 + 0.1 * i);
      const double v = x * h_inverse(c / x);
      CHECK(v >= prev * (1.0 - 1e-12));
      prev = v;
    }
  }
}

TEST_CASE("gaussian tail cdf and quantile") {
  CHECK(gauss_upper_cdf(0.0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(gauss_upper_quantile(0.5) == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(std::abs(gauss_upper_cdf(1.959964) - 0.025) <= 1e-9);
  CHECK(gauss_upper_cdf(1.959964) ==
        doctest::Approx(0.024999999096442404).epsilon(1e-13));
  // quadrature oracle
  for (double z : {-1.3, 0.4, 1.959964, 3.1}) {
    CHECK(gauss_upper_cdf(z) ==
          doctest::Approx(upper_tail_quadrature(z)).epsilon(1e-10));
  }
  // round trip at relative accuracy in p
  for (double p : {1e-12, 1e-6, 0.025, 0.3, 0.5, 0.77, 1.0 - 1e-9}) {
    const double q = gauss_upper_quantile(p);
    CHECK(std::abs(gauss_upper_cdf(q) - p) <= 1e-12 * p);
  }
  CHECK_THROWS_AS(gauss_upper_quantile(0.0), std::domain_error);
  CHECK_THROWS_AS(gauss_upper_quantile(1.0), std::domain_error);
}

TEST_CASE("kr_factor values and domain") {
  CHECK(kr_factor(0.25) == doctest::Approx(1.5939150475695934).epsilon(1e-13));
  CHECK(kr_factor(0.05) == doctest::Approx(2.1626293571160795).epsilon(1e-13));
  const double boundary = kr_factor(0.31);
  CHECK(boundary > 1.0);
  CHECK(boundary == doctest::Approx(1.5106733146613604).epsilon(1e-13));
  CHECK_THROWS_AS(kr_factor(0.32), std::domain_error);
  CHECK_THROWS_AS(kr_factor(0.0), std::domain_error);
  // strictly decreasing in delta
  double prev = kr_factor(0.01);
  for (double d : {0.05, 0.1, 0.2, 0.31}) {
    const double v = kr_factor(d);
    CHECK(v < prev);
    prev = v;
  }
}

TEST_CASE("kru factors exceed 1 and converge to 1") {
  const double delta = 0.25;
  // online variant, a=1, delta_1=0.05: log(20)/log(1+log(20))
  CHECK(kru_factor_online(1, 0.05) ==
        doctest::Approx(2.1626293571160795).epsilon(1e-13));
  double prev_pre = 1e18, prev_on = 1e18;
  for (int a : {1, 10, 100, 1000}) {
    const double delta_a = delta / (kKappa * a * a);
    const double pre = kru_factor_preordered(a, delta_a, 1.0);
    const double online = kru_factor_online(a, delta_a);
    CHECK(pre > 1.0);
    CHECK(online > 1.0);
    CHECK(pre < prev_pre);
    CHECK(online < prev_on);
    prev_pre = pre;
    prev_on = online;
  }
  // 1 + O(log a / a) trend at a = 1000
  const double d1000 = delta / (kKappa * 1000.0 * 1000.0);
  CHECK(kru_factor_preordered(1000, d1000, 1.0) - 1.0 <
        6.0 * std::log(1000.0) / 1000.0);
  CHECK(kru_factor_online(1000, d1000) - 1.0 < 6.0 * std::log(1000.0) / 1000.0);
  // strictly decreasing in delta_a
  CHECK(kru_factor_preordered(2, 0.1, 0.5) > kru_factor_preordered(2, 0.2, 0.5));
  CHECK(kru_factor_online(2, 0.1) > kru_factor_online(2, 0.2));
  CHECK_THROWS_AS(kru_factor_preordered(0, 0.1, 1.0), std::domain_error);
  CHECK_THROWS_AS(kru_factor_preordered(1, 1.5, 1.0), std::domain_error);
  CHECK_THROWS_AS(kru_factor_preordered(1, 0.1, 0.0), std::domain_error);
}

TEST_CASE("freedman deviation term") {
  CHECK(freedman_epsilon(1.0, 0.25) ==
        doctest::Approx(2.3589404986518696).epsilon(1e-13));
  CHECK(freedman_delta(1.0, 0.25) ==
        doctest::Approx(4.2512387944164464).epsilon(1e-13));
  // u v 1 clamps below one
  CHECK(freedman_delta(0.0, 0.25) == freedman_delta(1.0, 0.25));
  CHECK(freedman_delta(0.3, 0.1) == freedman_delta(1.0, 0.1));
  // strictly increasing on powers of two
  double prev = freedman_delta(1.0, 0.25);
  for (int e = 1; e <= 20; ++e) {
    const double v = freedman_delta(std::pow(2.0, e), 0.25);
    CHECK(v > prev);
    prev = v;
  }
  CHECK_THROWS_AS(freedman_delta(1.0, 0.0), std::domain_error);
  CHECK_THROWS_AS(freedman_delta(1.0, 1.0), std::domain_error);
  CHECK_THROWS_AS(freedman_delta(-1.0, 0.5), std::domain_error);
}

TEST_CASE("stitched freedman bound") {
  CHECK(stitched_freedman_bound(0.0, 1.0, 0.1) ==
        doctest::Approx(4.1861468052673155).epsilon(1e-13));
  // nondecreasing in v
  double prev = 0.0;
  for (double v : {0.0, 0.5, 1.0, 2.0, 8.0, 64.0, 1e4}) {
    const double b = stitched_freedman_bound(v, 1.0, 0.1);
    CHECK(b >= prev);
    prev = b;
  }
  // exact homogeneity with a power-of-two scale
  for (double v : {0.0, 0.7, 3.0, 123.0}) {
    CHECK(stitched_freedman_bound(4.0 * v, 2.0, 0.05) ==
          2.0 * stitched_freedman_bound(v, 1.0, 0.05));
    CHECK(stitched_freedman_bound(9.0 * v, 3.0, 0.05) ==
          doctest::Approx(3.0 * stitched_freedman_bound(v, 1.0, 0.05))
              .epsilon(1e-12));
  }
  CHECK_THROWS_AS(stitched_freedman_bound(1.0, 1.0, 0.5), std::domain_error);
}

TEST_CASE("tolerance config validation") {
  ToleranceConfig bad_tol{1e-6, 200};
  CHECK_THROWS_AS((h_inverse(1.0, bad_tol)), std::domain_error);
  ToleranceConfig bad_iter{1e-12, 0};
  CHECK_THROWS_AS((h_inverse(1.0, bad_iter)), std::domain_error);
}
