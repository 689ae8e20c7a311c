#include "fdpenv/preordered.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "fdpenv/numerics.hpp"

namespace fdpenv {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_delta(double delta) {
  if (!(delta > 0.0) || !(delta < 1.0))
    throw std::domain_error("delta must be in (0,1)");
}

void check_kr_thresholds(const PreorderedData& data) {
  if (data.lambda < data.s)
    throw std::domain_error("KR/KR-U require lambda >= s");
  if (!(data.lambda < 1.0))
    throw std::domain_error("KR/KR-U require lambda < 1");
}

// Lazily extended table of the pre-ordered KR-U prefactors for
// delta_a = delta/(kappa a^2).
struct KruFactors {
  double delta;
  double B;
  std::vector<double> f;  // f[a-1] = prefactor at union index a

  double at(std::size_t a) {
    while (f.size() < a) {
      const std::size_t next = f.size() + 1;
      const double delta_a =
          delta / (kKappa * static_cast<double>(next) * static_cast<double>(next));
      f.push_back(kru_factor_preordered(static_cast<int>(next), delta_a, B));
    }
    return f[a - 1];
  }
};

// min over a in {1..a_max} of factor_a * (a + add), early-stopped: every term
// is at least a, so indices past the current best cannot win.
double kru_min_count_bound(KruFactors& factors, double add, std::size_t a_max) {
  double best = kInf;
  for (std::size_t a = 1; a <= a_max; ++a) {
    if (static_cast<double>(a) >= best) break;
    best = std::min(best, factors.at(a) * (static_cast<double>(a) + add));
  }
  return best;
}

}  // namespace

void PreorderedData::validate() const {
  if (pvalues.empty()) throw std::invalid_argument("PreorderedData: empty");
  for (double v : pvalues)
    if (!(v >= 0.0) || !(v <= 1.0))
      throw std::invalid_argument("PreorderedData: p-value outside [0,1]");
  if (!(s > 0.0) || !(s <= 1.0))
    throw std::invalid_argument("PreorderedData: s must be in (0,1]");
  if (!(lambda >= 0.0) || !(lambda < 1.0))
    throw std::invalid_argument("PreorderedData: lambda must be in [0,1)");
  if (!labels.empty() && labels.size() != pvalues.size())
    throw std::invalid_argument("PreorderedData: labels length mismatch");
}

PreorderedCounts prefix_counts(const PreorderedData& data) {
  data.validate();
  const std::size_t m = data.size();
  PreorderedCounts counts;
  counts.below_s.resize(m);
  counts.above_lambda.resize(m);
  std::int64_t a = 0, n = 0;
  for (std::size_t i = 0; i < m; ++i) {
    if (data.pvalues[i] <= data.s) ++a;
    if (data.pvalues[i] > data.lambda) ++n;
    counts.below_s[i] = a;
    counts.above_lambda[i] = n;
  }
  return counts;
}

LfSelection lf_select(const PreorderedData& data, double alpha) {
  if (!(alpha > 0.0) || !(alpha < 1.0))
    throw std::domain_error("lf_select: alpha must be in (0,1)");
  const PreorderedCounts counts = prefix_counts(data);
  const double scale = data.s / (1.0 - data.lambda);
  const std::size_t m = data.size();
  for (std::size_t k = m; k >= 1; --k) {
    const double a = static_cast<double>(std::max<std::int64_t>(counts.below_s[k - 1], 1));
    const double fdp_hat =
        scale * (1.0 + static_cast<double>(counts.above_lambda[k - 1])) / a;
    if (fdp_hat <= alpha) return {k, counts.below_s[k - 1]};
  }
  return {0, 0};
}

Envelope preordered_envelope(Method method, const PreorderedData& data,
                             double delta) {
  check_delta(delta);
  data.validate();
  const PreorderedCounts counts = prefix_counts(data);
  const std::size_t m = data.size();
  const double scale = data.s / (1.0 - data.lambda);

  Envelope env;
  env.method = method;
  env.delta = delta;
  env.m_eff = static_cast<double>(m);
  env.bounds.resize(m);

  switch (method) {
    case Method::kFreedman: {
      const double nu =
          data.s * (1.0 + std::min(data.s, data.lambda) / (1.0 - data.lambda));
      for (std::size_t k = 1; k <= m; ++k) {
        const std::int64_t a = counts.below_s[k - 1];
        if (a == 0) {
          env.bounds[k - 1] = 1.0;
          continue;
        }
        const double num =
            scale * static_cast<double>(counts.above_lambda[k - 1]) +
            freedman_delta(nu * static_cast<double>(k), delta);
        env.bounds[k - 1] = std::min(1.0, num / static_cast<double>(a));
      }
      break;
    }
    case Method::kKr: {
      check_kr_thresholds(data);
      const double factor = kru_factor_preordered(1, delta, scale);
      for (std::size_t k = 1; k <= m; ++k) {
        const double a =
            static_cast<double>(std::max<std::int64_t>(counts.below_s[k - 1], 1));
        const double num =
            factor * (1.0 + scale * static_cast<double>(counts.above_lambda[k - 1]));
        env.bounds[k - 1] = std::min(1.0, num / a);
      }
      break;
    }
    case Method::kKru: {
      check_kr_thresholds(data);
      KruFactors factors{delta, scale, {}};
      const std::size_t a_max =
          static_cast<std::size_t>(std::max<std::int64_t>(counts.below_s[m - 1], 1));
      // the inner minimum depends on k only through N_k; cache per count
      std::int64_t cached_n = -1;
      double cached_min = kInf;
      for (std::size_t k = 1; k <= m; ++k) {
        const std::int64_t n = counts.above_lambda[k - 1];
        if (n != cached_n) {
          cached_n = n;
          cached_min =
              kru_min_count_bound(factors, scale * static_cast<double>(n), a_max);
        }
        const double a =
            static_cast<double>(std::max<std::int64_t>(counts.below_s[k - 1], 1));
        env.bounds[k - 1] = std::min(1.0, cached_min / a);
      }
      break;
    }
    default:
      throw std::invalid_argument(
          "preordered_envelope: method not defined on the pre-ordered path");
  }
  return env;
}

double lf_fdp_bound(Method method, const PreorderedData& data, double alpha,
                    double delta) {
  check_delta(delta);
  if (data.lambda < data.s)
    throw std::domain_error("lf_fdp_bound: requires lambda >= s");
  const LfSelection sel = lf_select(data, alpha);
  const double r = static_cast<double>(std::max<std::int64_t>(sel.r_hat, 1));
  const double scale = data.s / (1.0 - data.lambda);

  switch (method) {
    case Method::kKr:
      return std::min(1.0,
                      kru_factor_preordered(1, delta, scale) * (alpha + 1.0 / r));
    case Method::kFreedman: {
      const double nu =
          data.s * (1.0 + std::min(data.s, data.lambda) / (1.0 - data.lambda));
      return std::min(
          1.0, alpha + freedman_delta(nu * static_cast<double>(sel.k_hat), delta) / r);
    }
    case Method::kKru: {
      KruFactors factors{delta, scale, {}};
      const std::size_t a_max =
          static_cast<std::size_t>(std::max<std::int64_t>(sel.r_hat, 1));
      double best = kInf;
      for (std::size_t a = 1; a <= a_max; ++a) {
        if (static_cast<double>(a) / r >= best) break;
        best = std::min(best,
                        factors.at(a) * (alpha + static_cast<double>(a) / r));
      }
      return std::min(1.0, best);
    }
    default:
      throw std::invalid_argument(
          "lf_fdp_bound: method not defined on the pre-ordered path");
  }
}

namespace {

double fdp_infinity_value(double big_pi, double ratio_lambda, double ratio_s) {
  return (1.0 + big_pi * (ratio_lambda - 1.0)) / (1.0 + big_pi * (ratio_s - 1.0));
}

}  // namespace

PowerDiagnostics power_diagnostics_preordered(const PiCurve& pi, double f1_at_s,
                                              double f1_at_lambda, double s,
                                              double lambda, double alpha,
                                              std::size_t grid_points) {
  pi.validate();
  if (!(s > 0.0) || !(s <= 1.0))
    throw std::domain_error("power_diagnostics: s must be in (0,1]");
  if (!(lambda >= 0.0) || !(lambda < 1.0))
    throw std::domain_error("power_diagnostics: lambda must be in [0,1)");
  if (!(f1_at_s > s))
    throw std::domain_error("power_diagnostics: requires F1(s) > s");
  if (!(f1_at_lambda > lambda))
    throw std::domain_error("power_diagnostics: requires F1(lambda) > lambda");
  if (!(alpha > 0.0) || !(alpha < 1.0))
    throw std::domain_error("power_diagnostics: alpha must be in (0,1)");
  if (grid_points < 2)
    throw std::domain_error("power_diagnostics: grid_points must be >= 2");

  const double ratio_lambda = (1.0 - f1_at_lambda) / (1.0 - lambda);
  const double ratio_s = f1_at_s / s;
  const auto fdp_inf = [&](double t) {
    return fdp_infinity_value(pi.mean_integral(t), ratio_lambda, ratio_s);
  };

  PowerDiagnostics diag;
  diag.alpha_bar = fdp_infinity_value(pi.pi_at_zero(), ratio_lambda, ratio_s);
  if (alpha <= diag.alpha_bar)
    throw std::domain_error(
        "power_diagnostics: alpha <= alpha_bar, the limiting FDP never drops below alpha");

  // Pi(t) -> pi_tail as t -> inf, so the limiting FDP^inf value is explicit.
  const double limit = fdp_infinity_value(pi.pi_tail(), ratio_lambda, ratio_s);
  if (limit <= alpha) {
    diag.t_star = kInf;
  } else {
    double hi = 1.0;
    while (fdp_inf(hi) <= alpha) {
      hi *= 2.0;
      if (hi > 1e12)
        throw std::runtime_error("power_diagnostics: failed to bracket t_star");
    }
    double lo = 0.0;
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (fdp_inf(mid) <= alpha) lo = mid; else hi = mid;
      if (hi - lo <= 1e-12 * std::max(1.0, hi)) break;
    }
    diag.t_star = 0.5 * (lo + hi);
  }

  const double t_max =
      std::isfinite(diag.t_star) ? std::max(2.0 * diag.t_star, 1.0) : 4.0 * 64.0;
  diag.fdp_infinity_curve.reserve(grid_points);
  for (std::size_t i = 0; i < grid_points; ++i) {
    const double t = t_max * static_cast<double>(i) / static_cast<double>(grid_points - 1);
    diag.fdp_infinity_curve.emplace_back(t, fdp_inf(t));
  }
  return diag;
}

double predicted_lf_rejections(const PowerDiagnostics& diag, double m,
                               double beta, double s) {
  if (!(m >= 1.0)) throw std::domain_error("predicted_lf_rejections: m must be >= 1");
  if (!(beta >= 0.0) || !(beta < 1.0))
    throw std::domain_error("predicted_lf_rejections: beta must be in [0,1)");
  const double t_m = std::min(diag.t_star, std::pow(m, beta));
  return std::floor(std::pow(m, 1.0 - beta) * t_m) * s / 2.0;
}

}  // namespace fdpenv
