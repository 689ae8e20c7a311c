#include "fdpenv/models.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

#include "fdpenv/numerics.hpp"

namespace fdpenv {

void GaussianLocationConfig::validate() const {
  if (m < 1) throw std::domain_error("GaussianLocationConfig: m must be >= 1");
  if (!(b > 0.0)) throw std::domain_error("GaussianLocationConfig: b must be > 0");
  if (!(c > 0.0) || !(c < 1.0))
    throw std::domain_error("GaussianLocationConfig: c must be in (0,1)");
  if (!(beta >= 0.0) || !(beta < 1.0))
    throw std::domain_error("GaussianLocationConfig: beta must be in [0,1)");
  if (m1() < 1)
    throw std::domain_error("GaussianLocationConfig: c*m^(1-beta) < 1");
  if (mu_override && !(*mu_override > 0.0))
    throw std::domain_error("GaussianLocationConfig: mu_override must be > 0");
}

double GaussianLocationConfig::mu() const {
  if (mu_override) return *mu_override;
  return std::sqrt(2.0 * beta * std::log(static_cast<double>(m))) + b;
}

std::size_t GaussianLocationConfig::m1() const {
  return static_cast<std::size_t>(
      std::floor(c * std::pow(static_cast<double>(m), 1.0 - beta)));
}

PValueBatch gen_gaussian_topk(const GaussianLocationConfig& cfg, Rng& rng) {
  cfg.validate();
  const std::size_t m1 = cfg.m1();
  const double mu = cfg.mu();
  PValueBatch batch;
  batch.values.resize(cfg.m);
  batch.labels.resize(cfg.m);
  for (std::size_t i = 0; i < cfg.m; ++i) {
    const double u = rng.uniform();
    if (i < m1) {
      batch.labels[i] = 1;
      batch.values[i] = gauss_upper_cdf(mu + gauss_upper_quantile(u));
    } else {
      batch.labels[i] = 0;
      batch.values[i] = u;
    }
  }
  return batch;
}

PValueBatch gen_gaussian_topk(const GaussianLocationConfig& cfg, std::uint64_t seed) {
  Rng rng = make_replication_rng(seed, 0);
  return gen_gaussian_topk(cfg, rng);
}

void VctConfig::validate() const {
  pi_curve.validate();
  alt_dist.validate();
  if (!(beta >= 0.0) || !(beta < 1.0))
    throw std::domain_error("VctConfig: beta must be in [0,1)");
}

PreorderedData gen_vct(const VctConfig& cfg, std::size_t m, double s,
                       double lambda, Rng& rng) {
  cfg.validate();
  if (m < 1) throw std::domain_error("gen_vct: m must be >= 1");
  PreorderedData data;
  data.s = s;
  data.lambda = lambda;
  data.pvalues.resize(m);
  data.labels.resize(m);
  const double scale = std::pow(static_cast<double>(m), cfg.beta - 1.0);
  for (std::size_t k = 1; k <= m; ++k) {
    const double prob = cfg.pi_curve.pi(static_cast<double>(k) * scale);
    const bool alt = rng.bernoulli(prob);
    data.labels[k - 1] = alt ? 1 : 0;
    data.pvalues[k - 1] = alt ? cfg.alt_dist.sample(rng) : cfg.null_dist.sample(rng);
  }
  data.validate();
  return data;
}

PreorderedData gen_vct(const VctConfig& cfg, std::size_t m, double s,
                       double lambda, std::uint64_t seed) {
  Rng rng = make_replication_rng(seed, 0);
  return gen_vct(cfg, m, s, lambda, rng);
}

void OnlineMixtureConfig::validate() const {
  if (!(pi1 >= 0.0) || !(pi1 < 1.0))
    throw std::domain_error("OnlineMixtureConfig: pi1 must be in [0,1)");
  if (!(mu >= 0.0)) throw std::domain_error("OnlineMixtureConfig: mu must be >= 0");
  if (length < 1) throw std::domain_error("OnlineMixtureConfig: length must be >= 1");
}

OnlineStream gen_online_mixture(const OnlineMixtureConfig& cfg, Rng& rng) {
  cfg.validate();
  OnlineStream stream;
  stream.pvalues.resize(cfg.length);
  stream.labels.resize(cfg.length);
  for (std::size_t i = 0; i < cfg.length; ++i) {
    const bool alt = rng.bernoulli(cfg.pi1);
    stream.labels[i] = alt ? 1 : 0;
    const double u = rng.uniform();
    stream.pvalues[i] =
        alt ? gauss_upper_cdf(cfg.mu + gauss_upper_quantile(u)) : u;
  }
  return stream;
}

OnlineStream gen_online_mixture(const OnlineMixtureConfig& cfg, std::uint64_t seed) {
  Rng rng = make_replication_rng(seed, 0);
  return gen_online_mixture(cfg, rng);
}

std::vector<double> true_fdp_path(const std::vector<std::size_t>& order,
                                  const std::vector<std::uint8_t>& in_set,
                                  const std::vector<std::uint8_t>& labels) {
  if (labels.empty())
    throw std::runtime_error("true_fdp: truth labels are required");
  if (order.size() != in_set.size())
    throw std::invalid_argument("true_fdp: order/in_set length mismatch");
  std::vector<double> fdp(order.size());
  std::int64_t size = 0, nulls = 0;
  for (std::size_t k = 0; k < order.size(); ++k) {
    if (in_set[k]) {
      const std::size_t idx = order[k];
      if (idx >= labels.size())
        throw std::invalid_argument("true_fdp: index out of range");
      ++size;
      if (!labels[idx]) ++nulls;
    }
    fdp[k] = static_cast<double>(nulls) /
             static_cast<double>(std::max<std::int64_t>(size, 1));
  }
  return fdp;
}

std::vector<double> true_fdp_topk(const SortedPValues& sp,
                                  const std::vector<std::uint8_t>& labels) {
  const std::vector<std::uint8_t> all(sp.size(), 1);
  return true_fdp_path(sp.perm, all, labels);
}

std::vector<double> true_fdp_preordered(const PreorderedData& data) {
  if (!data.has_labels())
    throw std::runtime_error("true_fdp: truth labels are required");
  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::vector<std::uint8_t> in_set(data.size());
  for (std::size_t i = 0; i < data.size(); ++i)
    in_set[i] = data.pvalues[i] <= data.s ? 1 : 0;
  return true_fdp_path(order, in_set, data.labels);
}

std::vector<double> true_fdp_online(const std::vector<std::uint8_t>& labels,
                                    const std::vector<std::uint8_t>& rejected) {
  std::vector<std::size_t> order(rejected.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  return true_fdp_path(order, rejected, labels);
}

std::vector<double> oracle_vbar(const std::vector<std::uint8_t>& labels,
                                const std::vector<double>& critical_values,
                                double lambda, double delta) {
  if (labels.size() != critical_values.size())
    throw std::invalid_argument("oracle_vbar: labels/critical_values length mismatch");
  if (!(lambda >= 0.0) || !(lambda < 1.0))
    throw std::domain_error("oracle_vbar: lambda must be in [0,1)");
  std::vector<double> vbar(labels.size());
  double sum_alpha = 0.0, sum_nu = 0.0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (!labels[i]) {
      const double a = critical_values[i];
      sum_alpha += a;
      sum_nu += a * (1.0 + std::min(a, lambda) / (1.0 - lambda));
    }
    vbar[i] = sum_alpha / (1.0 - lambda) + freedman_delta(sum_nu, delta);
  }
  return vbar;
}

BhThresholds bh_theoretical_threshold(const GaussianLocationConfig& cfg,
                                      double alpha) {
  cfg.validate();
  if (!(alpha > 0.0) || !(alpha < 1.0))
    throw std::domain_error("bh_theoretical_threshold: alpha must be in (0,1)");
  const double md = static_cast<double>(cfg.m);
  const double m1 = static_cast<double>(cfg.m1());
  const double m0 = md - m1;
  const double mu = cfg.mu();
  const auto g = [&](double t) {
    return (m0 / md) * t + (m1 / md) * gauss_upper_cdf(gauss_upper_quantile(t) - mu);
  };
  const auto solve = [&](double slope) {
    // G(t) - slope*t is positive near 0 and negative near 1 when slope > 1
    double lo = 1e-300, hi = 1.0 - 1e-12;
    if (!(g(lo) - slope * lo > 0.0) || !(g(hi) - slope * hi < 0.0))
      throw std::runtime_error("bh_theoretical_threshold: root not bracketed");
    for (int it = 0; it < 2000; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (g(mid) - slope * mid > 0.0) lo = mid; else hi = mid;
      if (hi - lo <= 1e-14 * hi) break;
    }
    return 0.5 * (lo + hi);
  };
  BhThresholds th;
  th.t_star = solve(2.0 / alpha);
  th.t_sharp = solve(0.5 / alpha);
  return th;
}

}  // namespace fdpenv
