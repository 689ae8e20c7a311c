#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "fdpenv/distributions.hpp"
#include "fdpenv/preordered.hpp"
#include "fdpenv/topk.hpp"

// Synthetic data generators for the simulation models, oracle FDP computation
// from truth labels, and the oracle form of the general martingale envelope.

namespace fdpenv {

// Sparse one-sided Gaussian location model: m1 = floor(c*m^(1-beta))
// alternatives at mean mu_m = sqrt(2*beta*log(m)) + b, p_i = Phibar(X_i).
struct GaussianLocationConfig {
  std::size_t m = 100;
  double b = 1.5;
  double c = 0.5;
  double beta = 0.0;
  // Reproduces the experiment grids that fix mu independently of the model's
  // verge-of-detectability scaling.
  std::optional<double> mu_override;

  void validate() const;
  double mu() const;
  std::size_t m1() const;
};

PValueBatch gen_gaussian_topk(const GaussianLocationConfig& cfg, Rng& rng);
PValueBatch gen_gaussian_topk(const GaussianLocationConfig& cfg, std::uint64_t seed);

// Sparse VCT model: H_k ~ Bernoulli(pi(k*m^(beta-1))) independent, p-values
// from the null/alternative law accordingly, in path order.
struct VctConfig {
  PiCurve pi_curve = PiCurve::lf_exponential(0.4, 2.0);
  double beta = 0.0;
  NullDist null_dist;
  AltDist alt_dist;

  void validate() const;
};

PreorderedData gen_vct(const VctConfig& cfg, std::size_t m, double s,
                       double lambda, Rng& rng);
PreorderedData gen_vct(const VctConfig& cfg, std::size_t m, double s,
                       double lambda, std::uint64_t seed);

// Online i.i.d. mixture: alternatives with probability pi1, one-sided
// Gaussian alternative p-values at shift mu.
struct OnlineMixtureConfig {
  double pi1 = 0.3;
  double mu = 3.0;
  std::size_t length = 1000;

  void validate() const;
};

struct OnlineStream {
  std::vector<double> pvalues;
  std::vector<std::uint8_t> labels;
};

OnlineStream gen_online_mixture(const OnlineMixtureConfig& cfg, Rng& rng);
OnlineStream gen_online_mixture(const OnlineMixtureConfig& cfg, std::uint64_t seed);

// Exact oracle FDP along a path: at step k element order[k-1] joins the
// rejection set iff in_set[k-1]; FDP_k = |R_k cap nulls| / (|R_k| v 1).
// Throws when labels are absent.
std::vector<double> true_fdp_path(const std::vector<std::size_t>& order,
                                  const std::vector<std::uint8_t>& in_set,
                                  const std::vector<std::uint8_t>& labels);

std::vector<double> true_fdp_topk(const SortedPValues& sp,
                                  const std::vector<std::uint8_t>& labels);
std::vector<double> true_fdp_preordered(const PreorderedData& data);
std::vector<double> true_fdp_online(const std::vector<std::uint8_t>& labels,
                                    const std::vector<std::uint8_t>& rejected);

// Oracle count bound of the general envelope theorem (validation only):
//   Vbar_k = (sum_{i<=k} (1-H_i) alpha_i) / (1-lambda)
//            + Delta(sum_{i<=k} (1-H_i) nu_i),
// nu_i = alpha_i * (1 + min(alpha_i, lambda)/(1-lambda)). Holds uniformly in
// k with probability at least 1-delta for the null false-discovery counts.
std::vector<double> oracle_vbar(const std::vector<std::uint8_t>& labels,
                                const std::vector<double>& critical_values,
                                double lambda, double delta);

// Roots t_star (of G_m(t) = 2t/alpha) and t_sharp (of G_m(t) = 0.5t/alpha)
// with G_m(t) = (m0/m)t + (m1/m)*Phibar(Phibarinv(t) - mu_m); the BH rejection
// fraction alpha*khat/m lands in [t_star, t_sharp] with high probability.
struct BhThresholds {
  double t_star = 0.0;
  double t_sharp = 0.0;
};
BhThresholds bh_theoretical_threshold(const GaussianLocationConfig& cfg,
                                      double alpha);

}  // namespace fdpenv
