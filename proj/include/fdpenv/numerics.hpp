#pragma once

#include <cstdint>

// Scalar special functions and concentration-bound primitives shared by the
// envelope modules. All functions are pure and thread-safe.

namespace fdpenv {

// pi^2/6, the union-bound constant of the stitched (time-uniform) inequalities.
extern const double kKappa;

struct ToleranceConfig {
  double rel_tol = 1e-12;  // residual tolerance relative to max(1, target)
  int max_iter = 200;
};

// h(lambda) = lambda*(log(lambda) - 1) + 1, lambda > 1.
// Increasing and strictly convex with h(1+) = 0; this is the rate function of
// Wellner's inequality.
double h_eval(double lambda);

// Inverse of h on (0, inf). Bracketed Newton started from the analytic
// sandwich 1 + sqrt(2y) <= h^{-1}(y) <= (1 + sqrt(y/2))^2, with bisection
// fallback when a Newton step leaves the bracket.
double h_inverse(double y, const ToleranceConfig& tol = {});

// Upper tail of the standard normal, P(Z >= z).
double gauss_upper_cdf(double z);

// Inverse of gauss_upper_cdf on (0,1). Rational initial guess polished with
// Newton steps on the erfc-based tail; relative accuracy ~1e-14 in p.
double gauss_upper_quantile(double p);

// log(1/delta) / log(1 + log(1/delta)), valid for 0 < delta <= 0.31.
double kr_factor(double delta);

// Prefactor of the pre-ordered KR-family envelope for union index a:
//   log(1/delta_a) / (a * log(1 + (1 - delta_a^{B/a}) / B)).
double kru_factor_preordered(int a, double delta_a, double B);

// Online form of the same prefactor:
//   log(1/delta_a) / (a * log(1 + log(1/delta_a)/a)).
double kru_factor_online(int a, double delta_a);

// eps_u = log((1+kappa)/delta) + 2*log(1 + log2(u v 1)).
double freedman_epsilon(double u, double delta);

// Delta(u) = 2*sqrt(eps_u)*sqrt(u v 1) + eps_u/2, the deviation term of the
// uniform Freedman envelope. Nondecreasing in u.
double freedman_delta(double u, double delta);

// Stitched Freedman bound: with Vt = v v B^2 and
// eps = log(1/delta) + 2*log(1 + log2(Vt/B^2)), returns
// 2*sqrt(Vt*eps) + B*eps/2. Holds uniformly over time with probability at
// least 1 - (1+kappa)*delta for supermartingales with increments <= B.
double stitched_freedman_bound(double v, double B, double delta);

}  // namespace fdpenv
