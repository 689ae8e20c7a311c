#include "fdpenv/topk.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <stdexcept>

#include "fdpenv/numerics.hpp"

namespace fdpenv {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double log2_real(double x) { return std::log(x) / std::numbers::ln2; }

void check_delta(double delta) {
  if (!(delta > 0.0) || !(delta < 1.0))
    throw std::domain_error("delta must be in (0,1)");
}

void check_kr_delta(double delta) {
  if (delta > 0.31)
    throw std::domain_error("KR requires delta <= 0.31");
}

// C_t = 2*log(kappa/delta) + 4*log(1 + log2(1/t)) of the uniform Wellner bound.
double wellner_ct(double t, double delta) {
  return 2.0 * std::log(kKappa / delta) + 4.0 * std::log1p(log2_real(1.0 / t));
}

// t * n * h^{-1}(C_t / (t*n)), the unnormalized Wellner count bound;
// continuously extended by 0 at t = 0.
double wellner_count_bound(double t, double n, double delta) {
  if (t <= 0.0) return 0.0;
  const double x = n * t;
  return x * h_inverse(wellner_ct(t, delta) / x);
}

}  // namespace

void PValueBatch::validate() const {
  if (values.empty()) throw std::invalid_argument("PValueBatch: empty");
  for (double v : values)
    if (!(v >= 0.0) || !(v <= 1.0))
      throw std::invalid_argument("PValueBatch: p-value outside [0,1]");
  if (!labels.empty() && labels.size() != values.size())
    throw std::invalid_argument("PValueBatch: labels length mismatch");
}

SortedPValues SortedPValues::from(const PValueBatch& batch) {
  batch.validate();
  SortedPValues sp;
  const std::size_t m = batch.size();
  sp.perm.resize(m);
  std::iota(sp.perm.begin(), sp.perm.end(), std::size_t{0});
  std::stable_sort(sp.perm.begin(), sp.perm.end(),
                   [&](std::size_t a, std::size_t b) {
                     return batch.values[a] < batch.values[b];
                   });
  sp.sorted.resize(m);
  for (std::size_t r = 0; r < m; ++r) sp.sorted[r] = batch.values[sp.perm[r]];
  return sp;
}

std::size_t bh_select(const SortedPValues& sp, double alpha) {
  if (!(alpha > 0.0) || !(alpha < 1.0))
    throw std::domain_error("bh_select: alpha must be in (0,1)");
  const std::size_t m = sp.size();
  const double md = static_cast<double>(m);
  for (std::size_t k = m; k >= 1; --k) {
    if (md * sp.sorted[k - 1] <= alpha * static_cast<double>(k)) return k;
  }
  return 0;
}

std::size_t bh_select(const PValueBatch& batch, double alpha) {
  return bh_select(SortedPValues::from(batch), alpha);
}

Envelope topk_envelope(Method method, const SortedPValues& sp, double delta,
                       double m_eff) {
  check_delta(delta);
  if (!(m_eff > 0.0)) throw std::domain_error("topk_envelope: m_eff must be > 0");
  const std::size_t m = sp.size();
  if (m == 0) throw std::invalid_argument("topk_envelope: empty input");

  Envelope env;
  env.method = method;
  env.delta = delta;
  env.m_eff = m_eff;
  env.bounds.resize(m);

  switch (method) {
    case Method::kSimes: {
      for (std::size_t k = 1; k <= m; ++k)
        env.bounds[k - 1] =
            std::min(1.0, m_eff * sp.sorted[k - 1] / (static_cast<double>(k) * delta));
      break;
    }
    case Method::kDkw: {
      const double dev = std::sqrt(m_eff) * std::sqrt(0.5 * std::log(1.0 / delta));
      for (std::size_t k = 1; k <= m; ++k)
        env.bounds[k - 1] =
            std::min(1.0, (m_eff * sp.sorted[k - 1] + dev) / static_cast<double>(k));
      break;
    }
    case Method::kKr: {
      check_kr_delta(delta);
      const double c = kr_factor(delta);
      for (std::size_t k = 1; k <= m; ++k)
        env.bounds[k - 1] = std::min(
            1.0, c * (m_eff * sp.sorted[k - 1] + 1.0) / static_cast<double>(k));
      break;
    }
    case Method::kWellner: {
      for (std::size_t k = 1; k <= m; ++k)
        env.bounds[k - 1] = std::min(
            1.0, wellner_count_bound(sp.sorted[k - 1], m_eff, delta) /
                     static_cast<double>(k));
      break;
    }
    case Method::kHybrid: {
      const Envelope kr = topk_envelope(Method::kKr, sp, delta / 2.0, m_eff);
      const Envelope well = topk_envelope(Method::kWellner, sp, delta / 2.0, m_eff);
      for (std::size_t i = 0; i < m; ++i)
        env.bounds[i] = std::min(kr.bounds[i], well.bounds[i]);
      break;
    }
    default:
      throw std::invalid_argument("topk_envelope: method not defined on the top-k path");
  }
  return env;
}

Envelope topk_envelope(Method method, const PValueBatch& batch, double delta,
                       double m_eff) {
  return topk_envelope(method, SortedPValues::from(batch), delta, m_eff);
}

Envelope topk_envelope_adaptive(Method method, const SortedPValues& sp,
                                double delta) {
  check_delta(delta);
  Envelope env;
  if (method == Method::kHybrid) {
    const Envelope kr =
        topk_envelope(Method::kKr, sp, delta / 2.0, m0_upper(Method::kKr, sp, delta / 2.0));
    const Envelope well = topk_envelope(Method::kWellner, sp, delta / 2.0,
                                        m0_upper(Method::kWellner, sp, delta / 2.0));
    env = kr;
    env.method = Method::kHybrid;
    env.delta = delta;
    env.m_eff = well.m_eff;
    for (std::size_t i = 0; i < env.bounds.size(); ++i)
      env.bounds[i] = std::min(kr.bounds[i], well.bounds[i]);
  } else {
    env = topk_envelope(method, sp, delta, m0_upper(method, sp, delta));
  }
  env.adaptive = true;
  return env;
}

double m0_upper(Method method, const SortedPValues& sp, double delta) {
  check_delta(delta);
  const std::size_t m = sp.size();
  if (m == 0) throw std::invalid_argument("m0_upper: empty input");
  const double md = static_cast<double>(m);
  double best = md;  // cap at m
  const auto consider = [&](double v) { best = std::min(best, v); };
  const double positive =
      static_cast<double>(m - (std::upper_bound(sp.sorted.begin(), sp.sorted.end(), 0.0) -
                               sp.sorted.begin()));  // V_t in the t->0 limit

  switch (method) {
    case Method::kSimes: {
      consider(positive);
      for (std::size_t k = 1; k <= m; ++k) {
        const double t = sp.sorted[k - 1];
        if (!(t > 0.0)) continue;
        if (!(t < delta)) break;
        const double v = static_cast<double>(m - k);
        consider(v / (1.0 - t / delta));
      }
      break;
    }
    case Method::kDkw: {
      const double c = 0.5 * std::log(1.0 / delta);
      const double sc = std::sqrt(c);
      {
        const double root = 0.5 * sc + std::sqrt(0.25 * c + positive);
        consider(root * root);
      }
      for (std::size_t k = 1; k <= m; ++k) {
        const double t = sp.sorted[k - 1];
        if (!(t > 0.0) || !(t < 1.0)) continue;
        const double v = static_cast<double>(m - k);
        const double om = 1.0 - t;
        const double root = sc / (2.0 * om) + std::sqrt(c / (4.0 * om * om) + v / om);
        consider(root * root);
      }
      break;
    }
    case Method::kKr: {
      check_kr_delta(delta);
      const double cp = kr_factor(delta);
      consider(cp + positive);
      for (std::size_t k = 1; k <= m; ++k) {
        const double t = sp.sorted[k - 1];
        if (!(t > 0.0)) continue;
        if (!(t < 1.0 / cp)) break;
        const double v = static_cast<double>(m - k);
        consider((cp + v) / (1.0 - cp * t));
      }
      break;
    }
    case Method::kWellner: {
      for (std::size_t k = 1; k <= m; ++k) {
        const double t = sp.sorted[k - 1];
        if (!(t > 0.0) || !(t < 1.0)) continue;
        const double v = static_cast<double>(m - k);
        const double ct = wellner_ct(t, delta);
        const double om = 1.0 - t;
        const double root = std::sqrt(t * ct / (2.0 * om * om)) +
                            std::sqrt(ct / (2.0 * om * om) + v / om);
        consider(root * root);
      }
      break;
    }
    default:
      throw std::invalid_argument("m0_upper: no estimator for this method");
  }
  return best;
}

double bh_fdp_bound(Method method, const SortedPValues& sp, double alpha,
                    double delta, bool adaptive) {
  check_delta(delta);
  if (!(alpha > 0.0) || !(alpha < 1.0))
    throw std::domain_error("bh_fdp_bound: alpha must be in (0,1)");
  const std::size_t m = sp.size();
  const double md = static_cast<double>(m);
  const std::size_t khat = bh_select(sp, alpha);
  const double denom = static_cast<double>(std::max<std::size_t>(khat, 1));

  switch (method) {
    case Method::kSimes: {
      const double frac = adaptive ? m0_upper(Method::kSimes, sp, delta) / md : 1.0;
      return std::min(1.0, alpha * frac / delta);
    }
    case Method::kDkw: {
      const double m0 = adaptive ? m0_upper(Method::kDkw, sp, delta) : md;
      const double dev = std::sqrt(m0) * std::sqrt(0.5 * std::log(1.0 / delta));
      return std::min(1.0, alpha * (m0 / md) + dev / denom);
    }
    case Method::kKr: {
      check_kr_delta(delta);
      const double m0 = adaptive ? m0_upper(Method::kKr, sp, delta) : md;
      return std::min(1.0, kr_factor(delta) * (alpha * (m0 / md) + 1.0 / denom));
    }
    case Method::kWellner: {
      const double m0 = adaptive ? m0_upper(Method::kWellner, sp, delta) : md;
      const double t = alpha * denom / md;
      return std::min(1.0, wellner_count_bound(t, m0, delta) / denom);
    }
    case Method::kHybrid: {
      return std::min(bh_fdp_bound(Method::kKr, sp, alpha, delta / 2.0, adaptive),
                      bh_fdp_bound(Method::kWellner, sp, alpha, delta / 2.0, adaptive));
    }
    default:
      throw std::invalid_argument("bh_fdp_bound: method not defined on the top-k path");
  }
}

double bh_fdp_bound(Method method, const PValueBatch& batch, double alpha,
                    double delta, bool adaptive) {
  return bh_fdp_bound(method, SortedPValues::from(batch), alpha, delta, adaptive);
}

}  // namespace fdpenv
