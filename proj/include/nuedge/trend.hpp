#ifndef NUEDGE_TREND_HPP
#define NUEDGE_TREND_HPP

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include "nuedge/errors.hpp"

namespace nuedge {

/// Finite-n decision rules for asymptotic claims. Defaults: a sequence is
/// "bounded" if its extreme stays within 1.5x its median, "vanishing" if it
/// drops by at least 20% from first to last entry.
struct TrendRule {
  double bounded_factor = 1.5;
  double vanishing_drop = 0.2;
  /// Values below this are treated as exact zeros.
  double zero_floor = 1e-12;
};

inline double median(std::span<const double> v) {
  if (v.empty()) throw InputError("median of an empty sequence");
  std::vector<double> s(v.begin(), v.end());
  std::sort(s.begin(), s.end());
  const std::size_t k = s.size() / 2;
  return s.size() % 2 ? s[k] : 0.5 * (s[k - 1] + s[k]);
}

/// max(v) <= factor * median(v).
inline bool bounded_max(std::span<const double> v, const TrendRule& rule = {}) {
  const double mx = *std::max_element(v.begin(), v.end());
  return mx <= rule.zero_floor || mx <= rule.bounded_factor * median(v);
}

/// v.back() <= factor * median(v).
inline bool bounded_last(std::span<const double> v, const TrendRule& rule = {}) {
  return v.back() <= rule.zero_floor || v.back() <= rule.bounded_factor * median(v);
}

/// v.back() <= (1 - drop) * v.front().
inline bool vanishing(std::span<const double> v, const TrendRule& rule = {}) {
  if (v.front() <= rule.zero_floor) return v.back() <= rule.zero_floor;
  return v.back() <= (1.0 - rule.vanishing_drop) * v.front();
}

}  // namespace nuedge

#endif  // NUEDGE_TREND_HPP
