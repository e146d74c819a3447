#ifndef NUEDGE_SPECIAL_GAUSSIAN_HPP
#define NUEDGE_SPECIAL_GAUSSIAN_HPP

#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include <boost/math/special_functions/erf.hpp>

#include "nuedge/errors.hpp"
#include "nuedge/special/polynomial.hpp"

namespace nuedge {

inline constexpr int kMaxHermiteOrder = 64;

namespace detail {

inline void require_finite(double x, const char* who) {
  if (!std::isfinite(x)) throw DomainError(std::string(who) + ": non-finite argument");
}

inline void require_hermite_order(int k) {
  if (k < 0 || k > kMaxHermiteOrder)
    throw CapabilityError("Hermite order " + std::to_string(k) + " outside [0, " +
                          std::to_string(kMaxHermiteOrder) + "]");
}

inline const std::vector<DensePolynomial>& hermite_table() {
  static const std::vector<DensePolynomial> table = [] {
    std::vector<DensePolynomial> h;
    h.reserve(kMaxHermiteOrder + 1);
    h.push_back(DensePolynomial({1.0}));
    h.push_back(DensePolynomial({0.0, 1.0}));
    const DensePolynomial x({0.0, 1.0});
    for (int k = 1; k < kMaxHermiteOrder; ++k)
      h.push_back(x * h[static_cast<std::size_t>(k)] - static_cast<double>(k) * h[static_cast<std::size_t>(k - 1)]);
    return h;
  }();
  return table;
}

}  // namespace detail

/// Probabilists' Hermite polynomial He_k, defined by
/// (-1)^k He_k(x) phi(x) = phi^{(k)}(x). Not the physicists' H_k.
inline const DensePolynomial& hermite(int k) {
  detail::require_hermite_order(k);
  return detail::hermite_table()[static_cast<std::size_t>(k)];
}

/// He_k(x) by the three-term recurrence; avoids the monomial expansion.
inline double hermite_value(int k, double x) {
  detail::require_hermite_order(k);
  if (k == 0) return 1.0;
  double prev = 1.0, cur = x;
  for (int j = 1; j < k; ++j) {
    const double next = x * cur - j * prev;
    prev = cur;
    cur = next;
  }
  return cur;
}

inline double normal_pdf(double x) {
  detail::require_finite(x, "normal_pdf");
  return std::exp(-0.5 * x * x) * (0.5 * std::numbers::inv_sqrtpi * std::numbers::sqrt2);
}

/// Phi(x). Each half-line uses erfc of a non-negative argument so neither
/// tail suffers subtractive cancellation.
inline double normal_cdf(double x) {
  detail::require_finite(x, "normal_cdf");
  const double z = x / std::numbers::sqrt2;
  return x < 0.0 ? 0.5 * std::erfc(-z) : 1.0 - 0.5 * std::erfc(z);
}

/// 1 - Phi(x) without cancellation for large x.
inline double normal_sf(double x) {
  detail::require_finite(x, "normal_sf");
  return 0.5 * std::erfc(x / std::numbers::sqrt2);
}

inline double normal_quantile(double u) {
  if (!(u > 0.0 && u < 1.0)) {
    if (u == 0.0) return -std::numeric_limits<double>::infinity();
    if (u == 1.0) return std::numeric_limits<double>::infinity();
    throw DomainError("normal_quantile: probability outside [0, 1]");
  }
  return -std::numbers::sqrt2 * boost::math::erfc_inv(2.0 * u);
}

/// phi^{(k)}(x) = (-1)^k He_k(x) phi(x).
inline double gaussian_derivative(int k, double x) {
  detail::require_hermite_order(k);
  const double v = hermite_value(k, x) * normal_pdf(x);
  return (k % 2 == 0) ? v : -v;
}

}  // namespace nuedge

#endif  // NUEDGE_SPECIAL_GAUSSIAN_HPP
