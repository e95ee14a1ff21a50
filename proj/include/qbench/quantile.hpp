#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include "qbench/error.hpp"

namespace qbench {

/// Empirical quantile by sorted-order linear interpolation (position
/// p * (n - 1) between order statistics). `sorted` must be ascending and may
/// contain +inf; interpolating toward +inf yields +inf.
inline double quantile_sorted(std::span<const double> sorted, double p) {
  if (sorted.empty()) throw DomainError("quantile of an empty sample");
  if (!(p >= 0.0 && p <= 1.0)) throw DomainError("quantile probability must lie in [0,1]");
  const double pos = p * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  if (frac == 0.0 || lo == hi) return sorted[lo];
  if (std::isinf(sorted[hi]) || std::isinf(sorted[lo])) return sorted[hi];
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

inline double quantile(std::vector<double> values, double p) {
  std::sort(values.begin(), values.end());
  return quantile_sorted(values, p);
}

}  // namespace qbench
