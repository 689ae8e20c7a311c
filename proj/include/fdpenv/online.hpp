#pragma once

#include <cstdint>
#include <vector>

#include "fdpenv/envelope.hpp"

// Online testing: LORD critical values driven by a spending sequence, the
// incremental rejection state, the mFDR budget condition, and the online
// Freedman/KR/KR-U envelopes evaluated from (sum of alpha_i, R(k)).

namespace fdpenv {

// gamma_j proportional to j^{-exponent} for j >= 1 (0 for j <= 0). When
// normalized, divided by Z = sum_j j^{-exponent} so that sum gamma <= 1 as the
// online FDR theorem requires; raw mode reproduces the unnormalized sequence.
struct SpendingSequence {
  double exponent = 1.6;
  bool normalized = true;
  double norm = 1.0;
  mutable std::vector<double> tab;  // lazily grown; single-writer per stream

  static SpendingSequence power_law(double exponent = 1.6, bool normalized = true);
  double at(std::int64_t j) const;

  // Z via direct summation of 1e7 terms plus an integral tail correction.
  static double power_law_norm(double exponent);
};

struct OnlineState {
  // procedure parameters
  double alpha_level = 0.2;         // target FDR level
  double w0 = 0.1;                  // initial wealth, in [0, alpha_level]
  SpendingSequence gamma;

  // running state after k steps
  std::int64_t k = 0;
  double alpha_sum = 0.0;           // sum of alpha_i spent so far
  std::int64_t r = 0;               // rejection count R(k)
  std::vector<std::int64_t> rejection_times;  // tau_j, strictly increasing
  double last_alpha = 0.0;          // critical value used at step k
};

OnlineState make_lord_state(double alpha, double w0, SpendingSequence gamma);

// Critical value for step k+1:
//   W0*gamma_{k+1} + (alpha - W0)*gamma_{k+1-tau_1} + alpha*sum_{j>=2} gamma_{k+1-tau_j}.
// Depends only on past decisions.
double lord_next_alpha(const OnlineState& state);

// Applies one step with the LORD critical value; returns the decision and
// updates (k, alpha_sum, r, rejection_times) in place.
bool online_step(OnlineState& state, double p);

// Step with an externally supplied critical value (custom schedules).
bool online_step(OnlineState& state, double p, double alpha_k);

// alpha_sum <= alpha_level * (1 v R(k)).
bool check_mfdr_condition(const OnlineState& state);

// Current-step envelope value (Freedman / KR / KR-U) computed from
// (alpha_sum, r). KR-U minimizes over a in {1..ceil(2*sqrt(1 v r))} with
// delta_a = delta/(kappa a^2); widen_kru multiplies that range (test hook).
double online_envelope(Method method, const OnlineState& state, double delta,
                       double widen_kru = 1.0);

// Level-alpha form of the same bounds for procedures satisfying the mFDR
// condition: alpha_sum replaced by alpha*(1 v r).
double online_level_bound(Method method, std::int64_t r, double alpha,
                          double delta);

}  // namespace fdpenv
