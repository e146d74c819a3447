#ifndef NUEDGE_CUMULANTS_STATIONARY_HPP
#define NUEDGE_CUMULANTS_STATIONARY_HPP

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "nuedge/cumulants/moments.hpp"
#include "nuedge/errors.hpp"

namespace nuedge {

/// gamma_k(S_n) = n p_k + q_k + O(delta^n), fitted from exact cumulants.
struct StationaryCumulantFit {
  int kmax = 0;
  std::vector<double> p;  ///< p[k], k = 2..kmax
  std::vector<double> q;
  std::vector<int> n;
  std::vector<std::vector<double>> residuals;  ///< residuals[k][i] = gamma_k(S_{n_i}) - n_i p_k - q_k
  std::optional<double> delta_estimate;
  bool accepted = false;
  std::string reason;
};

inline constexpr double kStationaryDecay = 0.1;
inline constexpr double kStationaryNoise = 1e-9;

/// Last-difference fit: p_k = gamma_k(n_max) - gamma_k(n_max - 1),
/// q_k = gamma_k(n_max) - n_max p_k.
///
/// The fit is accepted when, for every k, the residuals over the upper half of
/// the remaining n-range are at most 0.1 of those over the lower half, or all
/// residuals sit below a 1e-9 relative noise floor.
inline StationaryCumulantFit fit_stationary(std::vector<CumulantSequence> cs, int kmax) {
  std::sort(cs.begin(), cs.end(), [](const auto& a, const auto& b) { return a.n() < b.n(); });
  if (cs.size() < 4) throw InputError("fit_stationary needs at least 4 values of n");
  const int nmax = cs.back().n(), nmin = cs.front().n();
  if (nmax < 2 * nmin) throw InputError("fit_stationary needs n_max >= 2 n_min");
  if (cs[cs.size() - 2].n() != nmax - 1) throw InputError("fit_stationary needs n_max - 1 in the range");
  if (kmax < 2 || kmax > kMaxCumulantOrder) throw CapabilityError("fit_stationary supports 2 <= kmax <= 9");
  for (const auto& c : cs)
    if (c.jmax() < kmax) throw InputError("cumulant sequence shorter than kmax");

  StationaryCumulantFit fit;
  fit.kmax = kmax;
  fit.p.assign(static_cast<std::size_t>(kmax) + 1, 0.0);
  fit.q.assign(fit.p.size(), 0.0);
  fit.residuals.assign(fit.p.size(), {});
  for (const auto& c : cs) fit.n.push_back(c.n());
  const auto& top = cs.back();
  const auto& prev = cs[cs.size() - 2];
  for (int k = 2; k <= kmax; ++k) {
    const auto ku = static_cast<std::size_t>(k);
    fit.p[ku] = top.gamma(k) - prev.gamma(k);
    fit.q[ku] = top.gamma(k) - nmax * fit.p[ku];
    for (const auto& c : cs) fit.residuals[ku].push_back(c.gamma(k) - c.n() * fit.p[ku] - fit.q[ku]);
  }
  if (!(fit.p[2] > 0.0)) throw DegeneracyError("fitted p_2 is not positive");

  // The last two points are zero by construction and carry no information.
  const std::size_t informative = cs.size() - 2;
  const std::size_t half = informative / 2;
  fit.accepted = true;
  for (int k = 2; k <= kmax && fit.accepted; ++k) {
    const auto& r = fit.residuals[static_cast<std::size_t>(k)];
    const double floor = kStationaryNoise * std::max(1.0, std::abs(top.gamma(k)));
    double lo = 0.0, hi = 0.0;
    for (std::size_t i = 0; i < informative; ++i) {
      double& slot = i < half ? lo : hi;
      slot = std::max(slot, std::abs(r[i]));
    }
    if (hi > kStationaryDecay * lo && hi > floor) {
      fit.accepted = false;
      fit.reason = "residuals of order " + std::to_string(k) + " do not decay";
    }
  }

  std::vector<double> xs, ys;
  const double floor2 = kStationaryNoise * std::max(1.0, std::abs(top.gamma(2)));
  for (std::size_t i = 0; i < informative; ++i) {
    const double a = std::abs(fit.residuals[2][i]);
    if (a > floor2) {
      xs.push_back(fit.n[i]);
      ys.push_back(std::log(a));
    }
  }
  if (xs.size() >= 2) {
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      mx += xs[i];
      my += ys[i];
    }
    mx /= static_cast<double>(xs.size());
    my /= static_cast<double>(xs.size());
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      sxy += (xs[i] - mx) * (ys[i] - my);
      sxx += (xs[i] - mx) * (xs[i] - mx);
    }
    const double slope = sxy / sxx;
    if (slope < 0.0) fit.delta_estimate = std::exp(slope);
  }
  return fit;
}

}  // namespace nuedge

#endif  // NUEDGE_CUMULANTS_STATIONARY_HPP
