#ifndef NUEDGE_TRANSPORT_DISTANCES_HPP
#define NUEDGE_TRANSPORT_DISTANCES_HPP

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "nuedge/errors.hpp"
#include "nuedge/special/gaussian.hpp"
#include "nuedge/special/quadrature.hpp"
#include "nuedge/transport/cdf.hpp"

namespace nuedge {

/// A computed quantity with its absolute error estimate.
struct Estimate {
  double value = 0.0;
  double error = 0.0;
};

namespace detail {

/// Sorted unique points of `pts` inside [a, b], with a and b added.
inline std::vector<double> panel_points(double a, double b, std::vector<double> pts) {
  pts.push_back(a);
  pts.push_back(b);
  std::sort(pts.begin(), pts.end());
  std::vector<double> out;
  for (double x : pts)
    if (x >= a && x <= b && (out.empty() || x > out.back())) out.push_back(x);
  return out;
}

/// F(x) - G(x), switching to survival functions in the upper half so that
/// upper tails keep full relative precision.
inline double cdf_difference(const GeneralizedCDF& F, const GeneralizedCDF& G, double x) {
  const double f = F(x), g = G(x);
  return (f > 0.5 || g > 0.5) ? G.sf(x) - F.sf(x) : f - g;
}

inline double cdf_difference_left(const GeneralizedCDF& F, const GeneralizedCDF& G, double x) {
  const double f = F.left(x), g = G.left(x);
  return (f > 0.5 || g > 0.5) ? G.sf_left(x) - F.sf_left(x) : f - g;
}

/// Bulk grid plus all jumps of F and G, refined by the sign changes of F - G
/// between consecutive points. |F - G|^q has a kink or cusp at each crossing,
/// so crossings must be panel edges.
inline std::vector<double> crossing_points(const GeneralizedCDF& F, const GeneralizedCDF& G, double lo,
                                           double hi) {
  std::vector<double> pts = F.jumps;
  pts.insert(pts.end(), G.jumps.begin(), G.jumps.end());
  const double bulk = std::min(8.0 * std::max({F.tail_scale, G.tail_scale, 1.0}), hi - lo);
  for (double x : linspace(std::max(lo, -bulk), std::min(hi, bulk), 257)) pts.push_back(x);
  pts = panel_points(lo, hi, std::move(pts));
  std::vector<double> roots;
  auto d = [&](double x) { return cdf_difference(F, G, x); };
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    double a = pts[i], b = pts[i + 1];
    // Right limit at a, left limit at b.
    const double da = d(a), db = cdf_difference_left(F, G, b);
    if (!(da * db < 0.0)) continue;
    const bool rising = da < 0.0;
    for (int it = 0; it < 200 && b - a > 1e-15 * std::max(1.0, std::abs(a)); ++it) {
      const double m = 0.5 * (a + b);
      if (m <= a || m >= b) break;
      ((d(m) < 0.0) == rising ? a : b) = m;
    }
    roots.push_back(0.5 * (a + b));
  }
  pts.insert(pts.end(), roots.begin(), roots.end());
  return panel_points(lo, hi, std::move(pts));
}

/// int_{12 s}^inf (2 Q(x / s))^q dx with Q the normal tail; both tails of
/// |F - G|^q beyond 12 tail scales are below this.
inline double gaussian_tail_remainder(double q, double s) {
  if (!(s > 0.0)) return 0.0;
  return std::pow(2.0 * normal_pdf(12.0) / 12.0, q) * s / (12.0 * q);
}

inline void require_equal_limits(const GeneralizedCDF& F, const GeneralizedCDF& G, double lo, double hi,
                                 const char* who) {
  if (std::abs(F(hi) - G(hi)) > 1e-9 || std::abs(F.left(lo) - G.left(lo)) > 1e-9)
    throw PreconditionError(std::string(who) + ": the two functions have different total mass");
}

/// int |F - G|^q dx over the joint truncation domain, tails bounded analytically.
inline Estimate integrate_difference_power(const GeneralizedCDF& F, const GeneralizedCDF& G, double q,
                                           const char* who) {
  const double lo = std::min(F.domain_lo(), G.domain_lo());
  const double hi = std::max(F.domain_hi(), G.domain_hi());
  require_equal_limits(F, G, lo, hi, who);
  if (hi <= lo) return {};
  const auto panels = crossing_points(F, G, lo, hi);
  auto f = [&](double x) { return std::pow(std::abs(cdf_difference(F, G, x)), q); };
  const auto r = integrate_panels(f, panels, {1e-9, 1e-14, 18});
  const double tail = gaussian_tail_remainder(q, std::max(F.tail_scale, G.tail_scale));
  if (!r.converged) throw NumericalError(std::string(who) + ": quadrature did not converge", r.error, r.value);
  return {r.value, r.error + 2.0 * tail};
}

}  // namespace detail

/// W_p between two monotone CDFs from the quantile coupling:
/// (int_0^1 |F^{-1}(u) - G^{-1}(u)|^p du)^{1/p}. Breakpoints at every atom level
/// make the integrand smooth on each panel.
inline Estimate wasserstein_p_estimate(const GeneralizedCDF& F, const GeneralizedCDF& G, double p) {
  if (!(p >= 1.0)) throw InputError("wasserstein_p needs p >= 1");
  if (!F.monotone || !G.monotone) throw PreconditionError("wasserstein_p needs monotone distribution functions");
  // Lower half in u, upper half in v = 1 - u, each substituted u = Phi(t) with
  // t in [-T, 0]: the integrable log singularity of Gaussian quantiles at 0
  // becomes a Gaussian-weighted smooth tail.
  constexpr double T = 12.0;
  auto to_t = [](std::vector<double> lv) {
    std::vector<double> t;
    for (double u : lv)
      if (u > 0.0 && u < 0.5) t.push_back(normal_quantile(u));
    return t;
  };
  std::vector<double> lo_lv = F.levels, hi_lv = F.survival;
  lo_lv.insert(lo_lv.end(), G.levels.begin(), G.levels.end());
  hi_lv.insert(hi_lv.end(), G.survival.begin(), G.survival.end());
  // The quantile difference changes sign at the levels of the crossings of F - G.
  {
    const double lo = std::min(F.domain_lo(), G.domain_lo()), hi = std::max(F.domain_hi(), G.domain_hi());
    for (double c : detail::crossing_points(F, G, lo, hi)) {
      for (double u : {F(c), G(c), F.left(c), G.left(c)}) lo_lv.push_back(u);
      for (double v : {F.sf(c), G.sf(c), F.sf_left(c), G.sf_left(c)}) hi_lv.push_back(v);
    }
  }
  const auto lower = detail::panel_points(-T, 0.0, to_t(std::move(lo_lv)));
  const auto upper = detail::panel_points(-T, 0.0, to_t(std::move(hi_lv)));
  const QuadOptions opt{1e-9, 1e-15, 18};
  auto fl = [&](double t) {
    return std::pow(std::abs(F.quantile(normal_cdf(t)) - G.quantile(normal_cdf(t))), p) * normal_pdf(t);
  };
  auto fu = [&](double t) {
    return std::pow(std::abs(F.upper_quantile(normal_cdf(t)) - G.upper_quantile(normal_cdf(t))), p) * normal_pdf(t);
  };
  auto r = integrate_panels(fl, lower, opt);
  const auto ru = integrate_panels(fu, upper, opt);
  r.value += ru.value;
  // Beyond -T the integrand decays like its boundary value times a Gaussian tail.
  r.error += ru.error + (fl(-T) + fu(-T)) / T;
  r.converged = r.converged && ru.converged;
  const bool tails_ok = p <= F.moment_order && p <= G.moment_order;
  if (!r.converged || !tails_ok || !std::isfinite(r.value)) {
    const double partial = std::pow(std::max(r.value, 0.0), 1.0 / p);
    throw NumericalError(tails_ok ? "wasserstein_p: quadrature did not converge"
                                  : "wasserstein_p: p exceeds the declared moment order",
                         r.error, partial);
  }
  const double W = std::pow(r.value, 1.0 / p);
  const double err = r.value > 0.0 ? W * r.error / (p * r.value) : std::pow(r.error, 1.0 / p);
  return {W, err};
}

inline double wasserstein_p(const GeneralizedCDF& F, const GeneralizedCDF& G, double p) {
  return wasserstein_p_estimate(F, G, p).value;
}

/// int |F(x) - G(x)|^{1/p} dx, an upper bound for W_p that also accepts signed
/// generalized distribution functions.
inline Estimate bobkov_bound_estimate(const GeneralizedCDF& F, const GeneralizedCDF& G, double p) {
  if (!(p >= 1.0)) throw InputError("bobkov_bound needs p >= 1");
  return detail::integrate_difference_power(F, G, 1.0 / p, "bobkov_bound");
}

inline double bobkov_bound(const GeneralizedCDF& F, const GeneralizedCDF& G, double p) {
  return bobkov_bound_estimate(F, G, p).value;
}

/// (int |F(x) - G(x)|^p dx)^{1/p}.
inline Estimate lp_dx_distance_estimate(const GeneralizedCDF& F, const GeneralizedCDF& G, double p) {
  if (!(p > 0.0)) throw InputError("lp_dx_distance needs p > 0");
  const auto I = detail::integrate_difference_power(F, G, p, "lp_dx_distance");
  const double v = std::pow(I.value, 1.0 / p);
  const double err = I.value > 0.0 ? v * I.error / (p * I.value) : std::pow(I.error, 1.0 / p);
  return {v, err};
}

inline double lp_dx_distance(const GeneralizedCDF& F, const GeneralizedCDF& G, double p) {
  return lp_dx_distance_estimate(F, G, p).value;
}

inline constexpr double kExpectationTolerance = 1e-7;

/// E[h] under dF from h(0) + int_0^inf h'(1 - F) dx - int_{-inf}^0 h' F dx.
///
/// `m` declares int |h'(x)| / (1 + |x|)^m dx < infinity; F must have moments
/// of order m. Throws NumericalError when the tail beyond the truncation
/// domain is not negligible at the 1e-7 level.
inline Estimate expectation_via_cdf_estimate(const GeneralizedCDF& F, const std::function<double(double)>& h_prime,
                                             double h0, double m) {
  if (m > F.moment_order) throw PreconditionError("expectation_via_cdf: F lacks moments of the declared order");
  const double lo = std::min(F.domain_lo(), 0.0), hi = std::max(F.domain_hi(), 0.0);
  std::vector<double> pts = F.jumps;
  pts.push_back(0.0);
  for (double x : linspace(std::max(lo, -8.0), std::min(hi, 8.0), 33)) pts.push_back(x);
  const auto panels = detail::panel_points(lo, hi, std::move(pts));
  auto f = [&](double x) { return x >= 0.0 ? h_prime(x) * F.sf(x) : -h_prime(x) * F.left(x); };
  const auto r = integrate_panels(f, panels, {1e-11, 1e-12, 18});
  double tail = 0.0;
  if (F.tail_scale > 0.0) {
    // |h'| at the cut times the remaining normal tail mass.
    const double q = normal_pdf(12.0) / 12.0 * F.tail_scale;
    tail = (std::abs(h_prime(hi)) + std::abs(h_prime(lo))) * q;
  }
  if (!std::isfinite(tail) || tail > kExpectationTolerance)
    throw NumericalError("expectation_via_cdf: h' grows too fast for the tails of F", tail, h0 + r.value);
  if (!r.converged) throw NumericalError("expectation_via_cdf: quadrature did not converge", r.error, h0 + r.value);
  return {h0 + r.value, r.error + tail};
}

inline double expectation_via_cdf(const GeneralizedCDF& F, const std::function<double(double)>& h_prime, double h0,
                                  double m) {
  return expectation_via_cdf_estimate(F, h_prime, h0, m).value;
}

}  // namespace nuedge

#endif  // NUEDGE_TRANSPORT_DISTANCES_HPP
