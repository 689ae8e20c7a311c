#pragma once

#include <cstdint>
#include <random>
#include <utility>
#include <vector>

// Named p-value laws and instantaneous-signal-probability curves used by the
// synthetic models and the pre-ordered power diagnostics. Named families keep
// experiment configs serializable; Tabulated is the escape hatch for curves
// supplied on a grid.

namespace fdpenv {

// Deterministic replication-level RNG. Uniforms are the (2j+1)/2^54 lattice,
// strictly inside (0,1), so inverse-CDF sampling never hits the endpoints.
struct Rng {
  std::mt19937_64 eng;

  double uniform() {
    return (static_cast<double>(eng() >> 11) * 2.0 + 1.0) * 0x1.0p-54;
  }
  bool bernoulli(double p) { return uniform() < p; }
};

// Derives an independent generator for (seed, stream); identical arguments
// give bit-identical streams regardless of thread count.
Rng make_replication_rng(std::uint64_t seed, std::uint64_t stream);

struct PiCurve {
  enum class Family { kLfExponential, kKnockoffLinear, kTabulated };

  Family family = Family::kLfExponential;
  double pi1 = 0.4;  // LF exponential: pi(t) = pi1*b*exp(-b*min(t,1))/(1-exp(-b))
  double b = 2.0;
  double z = 30.0;   // knockoff linear: pi(t) = 1/2 + (0 v (z-t)/(2(z-1))), clamped to 1
  std::vector<std::pair<double, double>> table;  // (t, pi(t)), t strictly increasing

  static PiCurve lf_exponential(double pi1, double b);
  static PiCurve knockoff_linear(double z);
  static PiCurve tabulated(std::vector<std::pair<double, double>> table);

  double pi(double t) const;             // clamped into [0,1]
  double mean_integral(double t) const;  // Pi(t) = t^{-1} int_0^t pi; Pi(0) = pi(0)
  double pi_at_zero() const { return pi(0.0); }
  double pi_tail() const;                // constant value past the decay range
  void validate() const;
};

struct NullDist {
  enum class Kind { kUniform, kBinaryKnockoff };
  Kind kind = Kind::kUniform;

  double cdf(double x) const;
  double sample(Rng& rng) const;
};

struct AltDist {
  enum class Kind { kOneSidedGaussian, kBinaryKnockoff };
  Kind kind = Kind::kOneSidedGaussian;
  double mu = 1.5;  // one-sided Gaussian shift
  double q = 0.9;   // binary knockoff: P(p = 1/2) under the alternative

  static AltDist one_sided_gaussian(double mu);
  static AltDist binary_knockoff(double q);

  double cdf(double x) const;
  double sample(Rng& rng) const;
  void validate() const;
};

}  // namespace fdpenv
