#include "fdpenv/online.hpp"

#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <stdexcept>

#include "fdpenv/numerics.hpp"

namespace fdpenv {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_delta(double delta) {
  if (!(delta > 0.0) || !(delta < 1.0))
    throw std::domain_error("delta must be in (0,1)");
}

double kru_online_min(double add, double r1, double delta, double widen) {
  const std::size_t a_max = static_cast<std::size_t>(
      std::ceil(2.0 * widen * std::sqrt(r1)));
  double best = kInf;
  for (std::size_t a = 1; a <= a_max; ++a) {
    const double ad = static_cast<double>(a);
    if (ad / r1 >= best) break;  // every term is at least a/r1
    const double delta_a = delta / (kKappa * ad * ad);
    best = std::min(best, kru_factor_online(static_cast<int>(a), delta_a) *
                              (add + ad) / r1);
  }
  return best;
}

}  // namespace

double SpendingSequence::power_law_norm(double exponent) {
  static std::mutex mu;
  static std::map<double, double> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(exponent);
  if (it != cache.end()) return it->second;

  // ascending terms summed from the small end for accuracy
  constexpr std::int64_t kTerms = 10'000'000;
  double sum = 0.0;
  for (std::int64_t j = kTerms; j >= 1; --j)
    sum += std::pow(static_cast<double>(j), -exponent);
  const double n = static_cast<double>(kTerms);
  sum += std::pow(n, 1.0 - exponent) / (exponent - 1.0) - 0.5 * std::pow(n, -exponent);
  cache[exponent] = sum;
  return sum;
}

SpendingSequence SpendingSequence::power_law(double exponent, bool normalized) {
  if (!(exponent > 1.0))
    throw std::domain_error("SpendingSequence: exponent must be > 1");
  SpendingSequence g;
  g.exponent = exponent;
  g.normalized = normalized;
  g.norm = normalized ? power_law_norm(exponent) : 1.0;
  return g;
}

double SpendingSequence::at(std::int64_t j) const {
  if (j <= 0) return 0.0;
  const std::size_t idx = static_cast<std::size_t>(j);
  if (idx >= tab.size()) {
    std::size_t next = std::max<std::size_t>(tab.size() * 2, 1024);
    next = std::max(next, idx + 1);
    const std::size_t old = tab.size();
    tab.resize(next);
    if (old == 0) tab[0] = 0.0;
    for (std::size_t i = std::max<std::size_t>(old, 1); i < next; ++i)
      tab[i] = std::pow(static_cast<double>(i), -exponent) / norm;
  }
  return tab[idx];
}

OnlineState make_lord_state(double alpha, double w0, SpendingSequence gamma) {
  if (!(alpha > 0.0) || !(alpha < 1.0))
    throw std::domain_error("make_lord_state: alpha must be in (0,1)");
  if (!(w0 >= 0.0) || w0 > alpha)
    throw std::domain_error("make_lord_state: W0 must be in [0, alpha]");
  OnlineState st;
  st.alpha_level = alpha;
  st.w0 = w0;
  st.gamma = std::move(gamma);
  return st;
}

double lord_next_alpha(const OnlineState& state) {
  const std::int64_t k = state.k + 1;
  double a = state.w0 * state.gamma.at(k);
  if (!state.rejection_times.empty()) {
    a += (state.alpha_level - state.w0) *
         state.gamma.at(k - state.rejection_times[0]);
    for (std::size_t j = 1; j < state.rejection_times.size(); ++j)
      a += state.alpha_level * state.gamma.at(k - state.rejection_times[j]);
  }
  return a;
}

bool online_step(OnlineState& state, double p, double alpha_k) {
  if (!(p >= 0.0) || !(p <= 1.0))
    throw std::domain_error("online_step: p must be in [0,1]");
  state.k += 1;
  state.alpha_sum += alpha_k;
  state.last_alpha = alpha_k;
  const bool rejected = (p <= alpha_k);
  if (rejected) {
    state.r += 1;
    state.rejection_times.push_back(state.k);
  }
  return rejected;
}

bool online_step(OnlineState& state, double p) {
  return online_step(state, p, lord_next_alpha(state));
}

bool check_mfdr_condition(const OnlineState& state) {
  return state.alpha_sum <=
         state.alpha_level * static_cast<double>(std::max<std::int64_t>(state.r, 1));
}

double online_envelope(Method method, const OnlineState& state, double delta,
                       double widen_kru) {
  check_delta(delta);
  const double r1 = static_cast<double>(std::max<std::int64_t>(state.r, 1));
  const double sum = state.alpha_sum;
  switch (method) {
    case Method::kFreedman:
      return std::min(1.0, (sum + freedman_delta(sum, delta)) / r1);
    case Method::kKr:
      return std::min(1.0, kru_factor_online(1, delta) * (1.0 + sum) / r1);
    case Method::kKru:
      return std::min(1.0, kru_online_min(sum, r1, delta, widen_kru));
    default:
      throw std::invalid_argument("online_envelope: method not defined online");
  }
}

double online_level_bound(Method method, std::int64_t r, double alpha,
                          double delta) {
  check_delta(delta);
  if (!(alpha > 0.0) || !(alpha < 1.0))
    throw std::domain_error("online_level_bound: alpha must be in (0,1)");
  const double r1 = static_cast<double>(std::max<std::int64_t>(r, 1));
  switch (method) {
    case Method::kKr:
      return std::min(1.0, kru_factor_online(1, delta) * (alpha + 1.0 / r1));
    case Method::kFreedman:
      return std::min(1.0, alpha + freedman_delta(alpha * r1, delta) / r1);
    case Method::kKru:
      return std::min(1.0, kru_online_min(alpha * r1, r1, delta, 1.0));
    default:
      throw std::invalid_argument("online_level_bound: method not defined online");
  }
}

}  // namespace fdpenv
