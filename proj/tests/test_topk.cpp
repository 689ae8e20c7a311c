#include "fdpenv/topk.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "fdpenv/numerics.hpp"

using namespace fdpenv;

namespace {

PValueBatch batch_of(std::vector<double> values) {
  PValueBatch b;
  b.values = std::move(values);
  return b;
}

// Exhaustive evaluation of max{k : m*p_(k) <= alpha*k}.
std::size_t bh_brute(std::vector<double> p, double alpha) {
  std::sort(p.begin(), p.end());
  const double m = static_cast<double>(p.size());
  std::size_t best = 0;
  for (std::size_t k = 1; k <= p.size(); ++k)
    if (m * p[k - 1] <= alpha * static_cast<double>(k)) best = k;
  return best;
}

// Direct minimization of the interpolation formula.
std::vector<double> interpolate_brute(const std::vector<double>& bounds,
                                      const std::vector<std::int64_t>& sizes) {
  std::vector<double> out(bounds.size());
  for (std::size_t k = 0; k < bounds.size(); ++k) {
    double best = 1e300;
    for (std::size_t kp = 0; kp <= k; ++kp) {
      const double rk = static_cast<double>(sizes[k]);
      const double rkp = static_cast<double>(sizes[kp]);
      best = std::min(best, rk - rkp + rkp * bounds[kp]);
    }
    out[k] = best / std::max<double>(static_cast<double>(sizes[k]), 1.0);
  }
  return out;
}

std::vector<double> random_pvalues(std::mt19937_64& eng, std::size_t m) {
  std::vector<double> p(m);
  for (double& v : p) v = (static_cast<double>(eng() >> 11)) * 0x1.0p-53;
  return p;
}

}  // namespace

TEST_CASE("bh_select on the worked example and edge cases") {
  CHECK(bh_select(batch_of({0.01, 0.02, 0.5}), 0.2) == 2);
  CHECK(bh_select(batch_of({1.0, 1.0, 1.0, 1.0}), 0.9) == 0);
  CHECK(bh_select(batch_of({0.0, 0.0, 0.0}), 0.05) == 3);
  CHECK_THROWS_AS(bh_select(batch_of({0.5}), 0.0), std::domain_error);
}

TEST_CASE("bh_select agrees with the exhaustive oracle") {
  std::mt19937_64 eng(7);
  for (int rep = 0; rep < 200; ++rep) {
    const std::size_t m = 1 + eng() % 40;
    const std::vector<double> p = random_pvalues(eng, m);
    for (double alpha : {0.05, 0.2, 0.5, 0.9}) {
      CHECK(bh_select(batch_of(p), alpha) == bh_brute(p, alpha));
    }
  }
}

TEST_CASE("sorted p-values reproduce the batch through the permutation") {
  std::mt19937_64 eng(11);
  const std::vector<double> p = random_pvalues(eng, 37);
  const SortedPValues sp = SortedPValues::from(batch_of(p));
  CHECK(std::is_sorted(sp.sorted.begin(), sp.sorted.end()));
  for (std::size_t r = 0; r < p.size(); ++r)
    CHECK(sp.sorted[r] == p[sp.perm[r]]);
}

TEST_CASE("topk envelope formulas at frozen points") {
  // Wellner: m=1000, k=100, p_(100)=0.01, delta=0.25
  {
    std::vector<double> p(1000, 0.5);
    for (int i = 0; i < 100; ++i) p[i] = 0.01;
    const Envelope env = topk_envelope(Method::kWellner, batch_of(p), 0.25, 1000.0);
    CHECK(env.bounds[99] == doctest::Approx(0.29025336215674052).epsilon(1e-10));
  }
  // DKW: m=100, k=10, p_(10)=0.01, delta=0.25
  {
    std::vector<double> p(100, 0.5);
    for (int i = 0; i < 10; ++i) p[i] = 0.01;
    const Envelope env = topk_envelope(Method::kDkw, batch_of(p), 0.25, 100.0);
    CHECK(env.bounds[9] == doctest::Approx(0.93255461115769776).epsilon(1e-12));
  }
  // Simes with p_(k) = 0 gives bound 0; Wellner extends continuously by 0
  {
    std::vector<double> p(10, 0.3);
    p[0] = 0.0;
    const Envelope simes = topk_envelope(Method::kSimes, batch_of(p), 0.25, 10.0);
    CHECK(simes.bounds[0] == 0.0);
    const Envelope well = topk_envelope(Method::kWellner, batch_of(p), 0.25, 10.0);
    CHECK(well.bounds[0] == 0.0);
  }
  // clamp at 1 when m*p_(k) is large
  {
    std::vector<double> p(50, 0.99);
    for (Method meth : {Method::kSimes, Method::kDkw, Method::kKr, Method::kWellner}) {
      const Envelope env = topk_envelope(meth, batch_of(p), 0.25, 50.0);
      CHECK(env.bounds[0] == 1.0);
    }
  }
  CHECK_THROWS_AS(
      (topk_envelope(Method::kKr, batch_of({0.1}), 0.4, 1.0)), std::domain_error);
  CHECK_THROWS_AS(
      (topk_envelope(Method::kSimes, batch_of({0.1}), 0.25, 0.0)), std::domain_error);
}

TEST_CASE("hybrid is the pointwise min of KR and Wellner at delta/2") {
  std::mt19937_64 eng(3);
  const std::vector<double> p = random_pvalues(eng, 200);
  const SortedPValues sp = SortedPValues::from(batch_of(p));
  const Envelope hybrid = topk_envelope(Method::kHybrid, sp, 0.25, 200.0);
  const Envelope kr = topk_envelope(Method::kKr, sp, 0.125, 200.0);
  const Envelope well = topk_envelope(Method::kWellner, sp, 0.125, 200.0);
  for (std::size_t i = 0; i < 200; ++i)
    CHECK(hybrid.bounds[i] == std::min(kr.bounds[i], well.bounds[i]));
}

TEST_CASE("m0_upper on the worked grids") {
  // all p = 1: every candidate at least m, cap active
  {
    std::vector<double> p(100, 1.0);
    const SortedPValues sp = SortedPValues::from(batch_of(p));
    CHECK(m0_upper(Method::kSimes, sp, 0.25) == 100.0);
  }
  // DKW, m=4: frozen grid minimum of the closed form
  {
    const SortedPValues sp =
        SortedPValues::from(batch_of({0.01, 0.02, 0.03, 0.04}));
    CHECK(m0_upper(Method::kDkw, sp, 0.25) ==
          doctest::Approx(0.75211282612841288).epsilon(1e-12));
  }
  // independent grid oracle on random samples, all four estimators
  std::mt19937_64 eng(17);
  for (int rep = 0; rep < 50; ++rep) {
    const std::size_t m = 2 + eng() % 30;
    std::vector<double> p = random_pvalues(eng, m);
    const SortedPValues sp = SortedPValues::from(batch_of(p));
    std::sort(p.begin(), p.end());
    const double delta = 0.25;
    const double md = static_cast<double>(m);

    double simes = md, dkw = md, kr = md, well = md;
    const double c_dkw = 0.5 * std::log(1.0 / delta);
    const double c_kr = kr_factor(delta);
    simes = std::min(simes, md);  // t->0 boundary (all p > 0 a.s.)
    dkw = std::min(dkw, std::pow(0.5 * std::sqrt(c_dkw) +
                                     std::sqrt(0.25 * c_dkw + md), 2.0));
    kr = std::min(kr, c_kr + md);
    for (std::size_t k = 1; k <= m; ++k) {
      const double t = p[k - 1];
      const double v = md - static_cast<double>(k);
      if (t > 0.0 && t < delta) simes = std::min(simes, v / (1.0 - t / delta));
      if (t > 0.0 && t < 1.0) {
        dkw = std::min(dkw, std::pow(std::sqrt(c_dkw) / (2.0 * (1.0 - t)) +
                                         std::sqrt(c_dkw / (4.0 * (1.0 - t) * (1.0 - t)) +
                                                   v / (1.0 - t)),
                                     2.0));
        const double ct = 2.0 * std::log(kKappa / delta) +
                          4.0 * std::log1p(std::log2(1.0 / t));
        well = std::min(well, std::pow(std::sqrt(t * ct / (2.0 * (1.0 - t) * (1.0 - t))) +
                                           std::sqrt(ct / (2.0 * (1.0 - t) * (1.0 - t)) +
                                                     v / (1.0 - t)),
                                       2.0));
      }
      if (t > 0.0 && t < 1.0 / c_kr) kr = std::min(kr, (c_kr + v) / (1.0 - c_kr * t));
    }
    CHECK(m0_upper(Method::kSimes, sp, delta) == doctest::Approx(simes).epsilon(1e-12));
    CHECK(m0_upper(Method::kDkw, sp, delta) == doctest::Approx(dkw).epsilon(1e-12));
    CHECK(m0_upper(Method::kKr, sp, delta) == doctest::Approx(kr).epsilon(1e-12));
    CHECK(m0_upper(Method::kWellner, sp, delta) == doctest::Approx(well).epsilon(1e-12));
    CHECK(m0_upper(Method::kWellner, sp, delta) <= md);
  }
  CHECK_THROWS_AS(
      (m0_upper(Method::kHybrid, SortedPValues::from(batch_of({0.1})), 0.25)),
      std::invalid_argument);
}

TEST_CASE("adaptive envelopes improve their raw counterparts pointwise") {
  std::mt19937_64 eng(23);
  for (int rep = 0; rep < 20; ++rep) {
    const std::size_t m = 10 + eng() % 100;
    std::vector<double> p = random_pvalues(eng, m);
    // sprinkle in signal so the estimators bite
    for (std::size_t i = 0; i < m / 3; ++i) p[i] *= 0.01;
    const SortedPValues sp = SortedPValues::from(batch_of(p));
    for (Method meth : {Method::kSimes, Method::kDkw, Method::kKr,
                        Method::kWellner, Method::kHybrid}) {
      const Envelope adaptive = topk_envelope_adaptive(meth, sp, 0.25);
      const Envelope raw =
          topk_envelope(meth, sp, 0.25, static_cast<double>(m));
      for (std::size_t i = 0; i < m; ++i) {
        CHECK(adaptive.bounds[i] <= raw.bounds[i] * (1.0 + 1e-12));
      }
    }
  }
}

TEST_CASE("interpolate worked examples and oracle") {
  // vacuous bound stays vacuous
  {
    Envelope raw;
    raw.bounds = {1.0, 1.0, 1.0, 1.0};
    const Envelope out = interpolate(raw, {1, 2, 3, 4});
    for (double b : out.bounds) CHECK(b == 1.0);
  }
  // raw = (0, 1), sizes = (1, 2) -> second bound 0.5
  {
    Envelope raw;
    raw.bounds = {0.0, 1.0};
    const Envelope out = interpolate(raw, {1, 2});
    CHECK(out.bounds[0] == 0.0);
    CHECK(out.bounds[1] == 0.5);
    CHECK(out.interpolated);
  }
  // pointwise below raw, agrees with the direct minimization
  std::mt19937_64 eng(29);
  for (int rep = 0; rep < 100; ++rep) {
    const std::size_t m = 1 + eng() % 30;
    Envelope raw;
    raw.bounds = random_pvalues(eng, m);
    std::vector<std::int64_t> sizes(m);
    std::int64_t acc = 0;
    for (std::size_t i = 0; i < m; ++i) {
      acc += eng() % 3;
      sizes[i] = acc;
    }
    const Envelope out = interpolate(raw, sizes);
    const std::vector<double> expected = interpolate_brute(raw.bounds, sizes);
    for (std::size_t i = 0; i < m; ++i) {
      CHECK(out.bounds[i] <= raw.bounds[i]);
      CHECK(out.bounds[i] == doctest::Approx(expected[i]).epsilon(1e-12));
    }
  }
  Envelope raw;
  raw.bounds = {0.5, 0.5};
  CHECK_THROWS_AS(interpolate(raw, {1}), std::invalid_argument);
  CHECK_THROWS_AS(interpolate(raw, {2, 1}), std::invalid_argument);
}

TEST_CASE("bh_fdp_bound closed forms") {
  std::mt19937_64 eng(31);
  const std::vector<double> p = random_pvalues(eng, 60);
  const SortedPValues sp = SortedPValues::from(batch_of(p));
  // Simes bound is data-free arithmetic
  CHECK(bh_fdp_bound(Method::kSimes, sp, 0.2, 0.25) == 0.8);
  CHECK(bh_fdp_bound(Method::kSimes, sp, 0.1, 0.25) ==
        doctest::Approx(0.4).epsilon(1e-15));
  // KR with k_hat = 0 clamps to 1 at delta=0.25, alpha=0.2
  {
    std::vector<double> ones(20, 1.0);
    const SortedPValues sp1 = SortedPValues::from(batch_of(ones));
    CHECK(bh_select(sp1, 0.2) == 0);
    CHECK(bh_fdp_bound(Method::kKr, sp1, 0.2, 0.25) == 1.0);
  }
  // Wellner with k_hat = m and alpha large: below 1, matches the direct formula
  {
    std::vector<double> small(2000, 1e-6);
    const SortedPValues sps = SortedPValues::from(batch_of(small));
    const double alpha = 0.9;
    CHECK(bh_select(sps, alpha) == 2000);
    const double t = alpha * 2000.0 / 2000.0;
    const double ct = 2.0 * std::log(kKappa / 0.25) +
                      4.0 * std::log1p(std::log2(1.0 / t));
    const double expect = std::min(1.0, alpha * h_inverse(ct / (alpha * 2000.0)));
    CHECK(expect < 1.0);
    CHECK(bh_fdp_bound(Method::kWellner, sps, alpha, 0.25) ==
          doctest::Approx(expect).epsilon(1e-12));
  }
  // adaptive never exceeds raw; hybrid is the min of its halves
  for (double alpha : {0.1, 0.2}) {
    for (Method meth : {Method::kSimes, Method::kDkw, Method::kKr,
                        Method::kWellner, Method::kHybrid}) {
      const double raw = bh_fdp_bound(meth, sp, alpha, 0.25, false);
      const double adapt = bh_fdp_bound(meth, sp, alpha, 0.25, true);
      CHECK(adapt <= raw * (1.0 + 1e-12));
    }
    CHECK(bh_fdp_bound(Method::kHybrid, sp, alpha, 0.25) ==
          std::min(bh_fdp_bound(Method::kKr, sp, alpha, 0.125),
                   bh_fdp_bound(Method::kWellner, sp, alpha, 0.125)));
  }
}

TEST_CASE("batch validation") {
  PValueBatch bad;
  bad.values = {0.2, 1.5};
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  PValueBatch empty;
  CHECK_THROWS_AS(empty.validate(), std::invalid_argument);
  PValueBatch mislabeled;
  mislabeled.values = {0.1, 0.2};
  mislabeled.labels = {1};
  CHECK_THROWS_AS(mislabeled.validate(), std::invalid_argument);
}
