#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "fdpenv/distributions.hpp"
#include "fdpenv/envelope.hpp"

// Pre-ordered path machinery: p-values explored in a fixed a-priori order and
// thresholded at s, the Lei-Fithian adaptive selective step-up (Barber-Candes
// at s = lambda = 1/2), the Freedman/KR/KR-U envelopes, the closed-form FDP
// bounds at the LF selection, and the asymptotic power diagnostics.

namespace fdpenv {

struct PreorderedData {
  std::vector<double> pvalues;  // already in path order pi(1..m)
  double s = 0.5;               // selection threshold, in (0,1]
  double lambda = 0.5;          // estimation threshold
  std::vector<std::uint8_t> labels;  // optional oracle truth, 1 = alternative

  std::size_t size() const { return pvalues.size(); }
  bool has_labels() const { return !labels.empty(); }
  void validate() const;
};

// A_k = #{i <= k : p_i <= s} and N_k = #{i <= k : p_i > lambda}, k = 1..m.
struct PreorderedCounts {
  std::vector<std::int64_t> below_s;
  std::vector<std::int64_t> above_lambda;
};
PreorderedCounts prefix_counts(const PreorderedData& data);

struct LfSelection {
  std::size_t k_hat = 0;   // selected path index
  std::int64_t r_hat = 0;  // rejection count A_{k_hat}
};

// max{k in 0..m : (s/(1-lambda)) * (1+N_k)/(1 v A_k) <= alpha}; k = 0 with an
// empty rejection set when no index qualifies.
LfSelection lf_select(const PreorderedData& data, double alpha);

// Per-k (1-delta)-envelopes. Freedman accepts lambda in [0,1); KR and KR-U
// require s <= lambda < 1. KR-U minimizes over a in {1..max(1, A_m)} with
// delta_a = delta/(kappa a^2).
Envelope preordered_envelope(Method method, const PreorderedData& data,
                             double delta);

// Closed-form bounds at the LF selection (KR-U minimizes over
// 1 <= a <= 1 v r_hat). Requires s <= lambda < 1.
double lf_fdp_bound(Method method, const PreorderedData& data, double alpha,
                    double delta);

// Asymptotic quantities of the sparse VCT analysis: the criticality level
// alpha_bar, the limiting rejection fraction t_star (infinity() when the
// feasible set is unbounded), and the FDP-infinity curve on a grid.
struct PowerDiagnostics {
  double alpha_bar = 0.0;
  double t_star = 0.0;
  std::vector<std::pair<double, double>> fdp_infinity_curve;  // (t, FDP^inf(t))
};

// f1_at_s = F1(s) and f1_at_lambda = F1(lambda) must satisfy F1(s) > s,
// F1(lambda) > lambda. Throws std::domain_error when alpha <= alpha_bar.
PowerDiagnostics power_diagnostics_preordered(const PiCurve& pi, double f1_at_s,
                                              double f1_at_lambda, double s,
                                              double lambda, double alpha,
                                              std::size_t grid_points = 129);

// floor(m^{1-beta} * min(t_star, m^beta)) * s / 2, the rejection count the LF
// procedure exceeds with high probability.
double predicted_lf_rejections(const PowerDiagnostics& diag, double m,
                               double beta, double s);

}  // namespace fdpenv
