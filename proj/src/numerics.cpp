#include "fdpenv/numerics.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace fdpenv {

const double kKappa = std::numbers::pi * std::numbers::pi / 6.0;

namespace {

constexpr double kLn2 = std::numbers::ln2;

double log2_real(double x) { return std::log(x) / kLn2; }

void check_tolerance(const ToleranceConfig& tol) {
  if (!(tol.rel_tol > 0.0) || tol.rel_tol > 1e-8)
    throw std::domain_error("ToleranceConfig: rel_tol must be in (0, 1e-8]");
  if (tol.max_iter < 1)
    throw std::domain_error("ToleranceConfig: max_iter must be >= 1");
}

// h written as lambda*log1p(u) - u with u = lambda - 1; avoids the
// cancellation of lambda*(log(lambda)-1) + 1 near lambda = 1.
double h_raw(double lambda) {
  const double u = lambda - 1.0;
  return lambda * std::log1p(u) - u;
}

}  // namespace

double h_eval(double lambda) {
  if (!(lambda > 1.0))
    throw std::domain_error("h_eval: lambda must be > 1");
  return h_raw(lambda);
}

double h_inverse(double y, const ToleranceConfig& tol) {
  if (!(y > 0.0)) throw std::domain_error("h_inverse: y must be > 0");
  check_tolerance(tol);

  double lo = 1.0 + std::sqrt(2.0 * y);
  double hi = 1.0 + std::sqrt(0.5 * y);
  hi *= hi;
  const double target = tol.rel_tol * std::max(1.0, y);

  double x = lo;
  for (int it = 0; it < tol.max_iter; ++it) {
    const double f = h_raw(x) - y;
    if (std::abs(f) <= target) return x;
    if (f < 0.0) lo = x; else hi = x;
    const double step = f / std::log(x);  // h' = log
    double next = x - step;
    if (!(next > lo) || !(next < hi)) next = 0.5 * (lo + hi);
    if (next == x) return x;  // bracket exhausted at double precision
    x = next;
  }
  throw std::runtime_error("h_inverse: did not converge for y=" + std::to_string(y));
}

double gauss_upper_cdf(double z) {
  return 0.5 * std::erfc(z / std::numbers::sqrt2);
}

namespace {

// Acklam's rational approximation to the standard normal quantile
// (lower-tail parameterization), |relative error| < 1.15e-9.
double norm_quantile_estimate(double p) {
  static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                             -2.759285104469687e+02, 1.383577518672690e+02,
                             -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                             -1.556989798598866e+02, 6.680131188771972e+01,
                             -1.328068155288572e+01};
  static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                             -2.400758277161838e+00, -2.549732539343734e+00,
                             4.374664141464968e+00,  2.938163982698783e+00};
  static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                             2.445134137142996e+00, 3.754408661907416e+00};
  constexpr double plow = 0.02425;

  if (p < plow) {
    const double q = std::sqrt(-2.0 * std::log(p));
    return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  if (p > 1.0 - plow) {
    const double q = std::sqrt(-2.0 * std::log(1.0 - p));
    return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  const double q = p - 0.5;
  const double r = q * q;
  return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
         (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
}

constexpr double kInvSqrt2Pi = 0.3989422804014326779399461;

}  // namespace

double gauss_upper_quantile(double p) {
  if (!(p > 0.0) || !(p < 1.0))
    throw std::domain_error("gauss_upper_quantile: p must be in (0,1)");
  // Phibar^{-1}(p) = -Phi^{-1}(p); the lower-tail branch of the estimate is
  // the accurate one for small p, so evaluate there and negate.
  double q = -norm_quantile_estimate(p);
  for (int it = 0; it < 3; ++it) {
    const double err = gauss_upper_cdf(q) - p;
    const double density = kInvSqrt2Pi * std::exp(-0.5 * q * q);
    if (density <= 0.0) break;
    const double step = err / density;
    q += step;
    if (std::abs(step) <= 1e-15 * (1.0 + std::abs(q))) break;
  }
  return q;
}

double kr_factor(double delta) {
  if (!(delta > 0.0) || delta > 0.31)
    throw std::domain_error("kr_factor: delta must be in (0, 0.31]");
  const double L = -std::log(delta);
  return L / std::log1p(L);
}

double kru_factor_preordered(int a, double delta_a, double B) {
  if (a < 1) throw std::domain_error("kru_factor_preordered: a must be >= 1");
  if (!(delta_a > 0.0) || !(delta_a < 1.0))
    throw std::domain_error("kru_factor_preordered: delta_a must be in (0,1)");
  if (!(B > 0.0)) throw std::domain_error("kru_factor_preordered: B must be > 0");
  const double L = -std::log(delta_a);
  const double pow_term = std::exp(-(B / a) * L);  // delta_a^{B/a}
  return L / (a * std::log1p((1.0 - pow_term) / B));
}

double kru_factor_online(int a, double delta_a) {
  if (a < 1) throw std::domain_error("kru_factor_online: a must be >= 1");
  if (!(delta_a > 0.0) || !(delta_a < 1.0))
    throw std::domain_error("kru_factor_online: delta_a must be in (0,1)");
  const double L = -std::log(delta_a);
  return L / (a * std::log1p(L / a));
}

double freedman_epsilon(double u, double delta) {
  if (!(u >= 0.0)) throw std::domain_error("freedman_epsilon: u must be >= 0");
  if (!(delta > 0.0) || !(delta < 1.0))
    throw std::domain_error("freedman_epsilon: delta must be in (0,1)");
  const double uv = std::max(u, 1.0);
  return std::log((1.0 + kKappa) / delta) + 2.0 * std::log1p(log2_real(uv));
}

double freedman_delta(double u, double delta) {
  const double eps = freedman_epsilon(u, delta);
  const double uv = std::max(u, 1.0);
  return 2.0 * std::sqrt(eps) * std::sqrt(uv) + 0.5 * eps;
}

double stitched_freedman_bound(double v, double B, double delta) {
  if (!(v >= 0.0)) throw std::domain_error("stitched_freedman_bound: v must be >= 0");
  if (!(B > 0.0)) throw std::domain_error("stitched_freedman_bound: B must be > 0");
  if (!(delta > 0.0) || !(delta < 1.0 / (1.0 + kKappa)))
    throw std::domain_error("stitched_freedman_bound: delta must be in (0, 1/(1+kappa))");
  const double B2 = B * B;
  const double vt = std::max(v, B2);
  const double eps = -std::log(delta) + 2.0 * std::log1p(log2_real(vt / B2));
  return 2.0 * std::sqrt(vt * eps) + 0.5 * B * eps;
}

}  // namespace fdpenv
