#pragma once

#include <cstdint>
#include <vector>

#include "fdpenv/envelope.hpp"

// Top-k path machinery: BH selection, the Simes/DKW/KR/Wellner/Hybrid
// confidence envelopes, Storey-type m0 upper confidence bounds, and the
// closed-form FDP bounds at the BH rejection set.

namespace fdpenv {

struct PValueBatch {
  std::vector<double> values;
  // Optional oracle truth labels, 1 = alternative, 0 = null. Either empty or
  // the same length as values. Simulation use only.
  std::vector<std::uint8_t> labels;

  bool has_labels() const { return !labels.empty(); }
  std::size_t size() const { return values.size(); }
  void validate() const;  // throws std::invalid_argument on violations
};

struct SortedPValues {
  std::vector<double> sorted;      // nondecreasing order statistics
  std::vector<std::size_t> perm;   // perm[rank] = original index (stable)

  std::size_t size() const { return sorted.size(); }
  static SortedPValues from(const PValueBatch& batch);
};

// Number of BH rejections at level alpha: max{k : m*p_(k) <= alpha*k}, 0 when
// no k qualifies.
std::size_t bh_select(const SortedPValues& sp, double alpha);
std::size_t bh_select(const PValueBatch& batch, double alpha);

// Per-k top-k envelope with the multiplier m replaced by m_eff. Methods:
// Simes, DKW, KR (delta <= 0.31), Wellner, Hybrid (min of KR and Wellner,
// each at delta/2). Values are clamped into [0,1].
Envelope topk_envelope(Method method, const SortedPValues& sp, double delta,
                       double m_eff);
Envelope topk_envelope(Method method, const PValueBatch& batch, double delta,
                       double m_eff);

// Same with m_eff = the method's own m0 upper bound (Hybrid: each half uses
// its own estimator at delta/2).
Envelope topk_envelope_adaptive(Method method, const SortedPValues& sp,
                                double delta);

// (1-delta)-confidence upper bound on the number of true nulls, evaluated on
// the finite grid t = p_(k) (V_t = m - k) plus the t->0 boundary where
// finite; capped at m. Defined for Simes, DKW, KR, Wellner.
double m0_upper(Method method, const SortedPValues& sp, double delta);

// Closed-form (1-delta)-confidence bound on FDP(BH at level alpha); the
// adaptive flag switches to the m0-estimated forms.
double bh_fdp_bound(Method method, const SortedPValues& sp, double alpha,
                    double delta, bool adaptive = false);
double bh_fdp_bound(Method method, const PValueBatch& batch, double alpha,
                    double delta, bool adaptive = false);

}  // namespace fdpenv
