#include "fdpenv/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "fdpenv/numerics.hpp"

namespace fdpenv {

namespace {

std::uint64_t splitmix64(std::uint64_t& x) {
  x += 0x9E3779B97F4A7C15ULL;
  std::uint64_t z = x;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace

Rng make_replication_rng(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t x = seed ^ (0x9E3779B97F4A7C15ULL * (stream + 1));
  const std::uint64_t s1 = splitmix64(x);
  const std::uint64_t s2 = splitmix64(x);
  Rng rng;
  rng.eng.seed(s1 ^ (s2 << 1));
  return rng;
}

PiCurve PiCurve::lf_exponential(double pi1, double b) {
  PiCurve c;
  c.family = Family::kLfExponential;
  c.pi1 = pi1;
  c.b = b;
  c.validate();
  return c;
}

PiCurve PiCurve::knockoff_linear(double z) {
  PiCurve c;
  c.family = Family::kKnockoffLinear;
  c.z = z;
  c.validate();
  return c;
}

PiCurve PiCurve::tabulated(std::vector<std::pair<double, double>> table) {
  PiCurve c;
  c.family = Family::kTabulated;
  c.table = std::move(table);
  c.validate();
  return c;
}

void PiCurve::validate() const {
  switch (family) {
    case Family::kLfExponential:
      if (!(pi1 > 0.0) || !(pi1 < 1.0))
        throw std::domain_error("PiCurve: pi1 must be in (0,1)");
      if (!(b > 0.0)) throw std::domain_error("PiCurve: b must be > 0");
      break;
    case Family::kKnockoffLinear:
      if (!(z > 1.0)) throw std::domain_error("PiCurve: z must be > 1");
      break;
    case Family::kTabulated: {
      if (table.size() < 2)
        throw std::domain_error("PiCurve: table needs at least 2 points");
      double prev_t = -1.0;
      for (const auto& [t, p] : table) {
        if (!(t >= 0.0) || t <= prev_t)
          throw std::domain_error("PiCurve: table abscissae must increase from >= 0");
        if (!(p >= 0.0) || !(p <= 1.0))
          throw std::domain_error("PiCurve: table values must be in [0,1]");
        prev_t = t;
      }
      if (!(table.front().second > 0.0))
        throw std::domain_error("PiCurve: pi(0) must be > 0");
      break;
    }
  }
  if (!(pi(0.0) > 0.0)) throw std::domain_error("PiCurve: pi(0) must be > 0");
}

double PiCurve::pi(double t) const {
  double v = 0.0;
  switch (family) {
    case Family::kLfExponential: {
      const double tt = std::min(t, 1.0);
      v = pi1 * b * std::exp(-b * tt) / (1.0 - std::exp(-b));
      break;
    }
    case Family::kKnockoffLinear: {
      v = 0.5 + std::max(0.0, 0.5 * (z - t) / (z - 1.0));
      break;
    }
    case Family::kTabulated: {
      if (t <= table.front().first) { v = table.front().second; break; }
      if (t >= table.back().first) { v = table.back().second; break; }
      auto it = std::upper_bound(table.begin(), table.end(), t,
                                 [](double x, const auto& p) { return x < p.first; });
      const auto& [t1, p1] = *it;
      const auto& [t0, p0] = *(it - 1);
      v = p0 + (p1 - p0) * (t - t0) / (t1 - t0);
      break;
    }
  }
  return std::clamp(v, 0.0, 1.0);
}

double PiCurve::mean_integral(double t) const {
  if (t <= 0.0) return pi(0.0);
  switch (family) {
    case Family::kLfExponential: {
      if (t <= 1.0)
        return pi1 * (1.0 - std::exp(-b * t)) / ((1.0 - std::exp(-b)) * t);
      // int_0^1 pi = pi1, then the constant tail pi(1)
      return (pi1 + pi(1.0) * (t - 1.0)) / t;
    }
    case Family::kKnockoffLinear: {
      // pi = 1 on [0,1] (the unclamped line sits above 1 there), linear on
      // [1,z], constant 1/2 after z
      if (t <= 1.0) return 1.0;
      const auto integral_1_to = [&](double u) {
        return ((2.0 * z - 1.0) * (u - 1.0) - 0.5 * (u * u - 1.0)) / (2.0 * (z - 1.0));
      };
      if (t <= z) return (1.0 + integral_1_to(t)) / t;
      return (1.0 + integral_1_to(z) + 0.5 * (t - z)) / t;
    }
    case Family::kTabulated: {
      // trapezoid integral of the clamped, piecewise-linear curve
      double acc = 0.0;
      double prev_t = 0.0;
      double prev_p = pi(0.0);
      for (const auto& [ti, _] : table) {
        if (ti <= 0.0) continue;
        const double ui = std::min(ti, t);
        const double pi_ui = pi(ui);
        acc += 0.5 * (prev_p + pi_ui) * (ui - prev_t);
        prev_t = ui;
        prev_p = pi_ui;
        if (ti >= t) break;
      }
      if (t > prev_t) acc += pi(t) * (t - prev_t);
      return acc / t;
    }
  }
  return 0.0;
}

double PiCurve::pi_tail() const {
  switch (family) {
    case Family::kLfExponential: return pi(1.0);
    case Family::kKnockoffLinear: return 0.5;
    case Family::kTabulated: return table.back().second;
  }
  return 0.0;
}

double NullDist::cdf(double x) const {
  switch (kind) {
    case Kind::kUniform: return std::clamp(x, 0.0, 1.0);
    case Kind::kBinaryKnockoff:
      return (x >= 1.0 ? 1.0 : (x >= 0.5 ? 0.5 : 0.0));
  }
  return 0.0;
}

double NullDist::sample(Rng& rng) const {
  switch (kind) {
    case Kind::kUniform: return rng.uniform();
    case Kind::kBinaryKnockoff: return rng.uniform() < 0.5 ? 0.5 : 1.0;
  }
  return 1.0;
}

AltDist AltDist::one_sided_gaussian(double mu) {
  AltDist d;
  d.kind = Kind::kOneSidedGaussian;
  d.mu = mu;
  d.validate();
  return d;
}

AltDist AltDist::binary_knockoff(double q) {
  AltDist d;
  d.kind = Kind::kBinaryKnockoff;
  d.q = q;
  d.validate();
  return d;
}

void AltDist::validate() const {
  if (kind == Kind::kBinaryKnockoff && (!(q > 0.0) || !(q <= 1.0)))
    throw std::domain_error("AltDist: q must be in (0,1]");
}

double AltDist::cdf(double x) const {
  switch (kind) {
    case Kind::kOneSidedGaussian: {
      if (x <= 0.0) return 0.0;
      if (x >= 1.0) return 1.0;
      return gauss_upper_cdf(gauss_upper_quantile(x) - mu);
    }
    case Kind::kBinaryKnockoff:
      return (x >= 1.0 ? 1.0 : (x >= 0.5 ? q : 0.0));
  }
  return 0.0;
}

double AltDist::sample(Rng& rng) const {
  switch (kind) {
    case Kind::kOneSidedGaussian:
      return gauss_upper_cdf(mu + gauss_upper_quantile(rng.uniform()));
    case Kind::kBinaryKnockoff:
      return rng.uniform() < q ? 0.5 : 1.0;
  }
  return 1.0;
}

}  // namespace fdpenv
