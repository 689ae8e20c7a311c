#include "fdpenv/envelope.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

namespace fdpenv {

std::string_view method_name(Method m) {
  switch (m) {
    case Method::kSimes: return "simes";
    case Method::kDkw: return "dkw";
    case Method::kKr: return "kr";
    case Method::kWellner: return "wellner";
    case Method::kHybrid: return "hybrid";
    case Method::kFreedman: return "freedman";
    case Method::kKru: return "kru";
  }
  return "?";
}

Method method_from_name(std::string_view name) {
  if (name == "simes") return Method::kSimes;
  if (name == "dkw") return Method::kDkw;
  if (name == "kr") return Method::kKr;
  if (name == "wellner") return Method::kWellner;
  if (name == "hybrid") return Method::kHybrid;
  if (name == "freedman") return Method::kFreedman;
  if (name == "kru" || name == "kr-u") return Method::kKru;
  throw std::invalid_argument("unknown envelope method: " + std::string(name));
}

Envelope interpolate(const Envelope& raw,
                     const std::vector<std::int64_t>& rejection_sizes) {
  if (rejection_sizes.size() != raw.bounds.size())
    throw std::invalid_argument("interpolate: rejection_sizes length mismatch");

  Envelope out = raw;
  out.interpolated = true;
  double running_min = std::numeric_limits<double>::infinity();
  std::int64_t prev_size = 0;
  for (std::size_t i = 0; i < raw.bounds.size(); ++i) {
    const std::int64_t size = rejection_sizes[i];
    if (size < prev_size)
      throw std::invalid_argument("interpolate: rejection_sizes must be nondecreasing");
    prev_size = size;
    const double rk = static_cast<double>(size);
    running_min = std::min(running_min, rk * (raw.bounds[i] - 1.0));
    double v = (rk + running_min) / std::max(rk, 1.0);
    v = std::clamp(v, 0.0, 1.0);
    out.bounds[i] = std::min(v, raw.bounds[i]);
  }
  return out;
}

}  // namespace fdpenv
