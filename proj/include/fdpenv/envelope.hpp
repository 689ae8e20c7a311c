#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace fdpenv {

enum class Method {
  kSimes,
  kDkw,
  kKr,
  kWellner,
  kHybrid,
  kFreedman,
  kKru,
};

std::string_view method_name(Method m);
Method method_from_name(std::string_view name);

// A per-k sequence of FDP upper bounds in [0,1] along a nested path,
// simultaneously valid with probability at least 1 - delta.
struct Envelope {
  std::vector<double> bounds;  // indexed by k = 1..K at [k-1]
  Method method = Method::kSimes;
  double delta = 0.25;
  bool adaptive = false;
  bool interpolated = false;
  double m_eff = 0.0;  // multiplier used in the formulas (m or an m0 bound)
};

// Sharpens an envelope along a nested path using
//   min_{k' <= k} { |R_k| - |R_{k'}| + |R_{k'}| * bound_{k'} } / (|R_k| v 1),
// computed in one pass via the running minimum of |R_{k'}|*(bound_{k'} - 1).
// rejection_sizes[k-1] = |R_k| must be nondecreasing. Output is pointwise <=
// the input.
Envelope interpolate(const Envelope& raw,
                     const std::vector<std::int64_t>& rejection_sizes);

}  // namespace fdpenv
