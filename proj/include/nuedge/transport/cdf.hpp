#ifndef NUEDGE_TRANSPORT_CDF_HPP
#define NUEDGE_TRANSPORT_CDF_HPP

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <memory>
#include <numeric>
#include <string>
#include <vector>

#include "nuedge/edgeworth/expansion.hpp"
#include "nuedge/errors.hpp"
#include "nuedge/models/lattice.hpp"
#include "nuedge/models/montecarlo.hpp"
#include "nuedge/models/piecewise.hpp"
#include "nuedge/special/gaussian.hpp"

namespace nuedge {

/// Function of bounded variation with limits 0 and 1 at -inf and +inf.
///
/// Outside [lower, upper] the function equals its limits exactly when
/// `tail_scale` is 0; otherwise its tails are those of a centered normal law
/// with standard deviation tail_scale (or lighter), which bounds truncation
/// remainders.
struct GeneralizedCDF {
  std::function<double(double)> F;
  /// F(x-); defaults to F for continuous laws.
  std::function<double(double)> F_left;
  /// 1 - F(x) and 1 - F(x-), computed without cancellation when provided.
  std::function<double(double)> S;
  std::function<double(double)> S_left;
  /// Generalized inverse inf{x : F(x) >= u}; bisection on F when empty.
  std::function<double(double)> quantile_fn;
  /// v -> quantile(1 - v) without forming 1 - v, for the upper tail.
  std::function<double(double)> upper_quantile_fn;
  bool monotone = true;
  double lower = 0.0;
  double upper = 0.0;
  double tail_scale = 0.0;
  /// Order up to which absolute moments are finite.
  double moment_order = std::numeric_limits<double>::infinity();
  /// Jump locations, ascending (lattice atoms).
  std::vector<double> jumps;
  /// F and 1 - F just after each jump; quantile breakpoints.
  std::vector<double> levels;
  std::vector<double> survival;
  std::string label;

  double operator()(double x) const { return F(x); }
  double left(double x) const { return F_left ? F_left(x) : F(x); }
  double sf(double x) const { return S ? S(x) : 1.0 - F(x); }
  double sf_left(double x) const { return S_left ? S_left(x) : (S && !F_left ? S(x) : 1.0 - left(x)); }

  /// Truncation domain: [lower, upper] widened to +-12 tail scales.
  double domain_lo() const noexcept { return tail_scale > 0.0 ? std::min(lower, -12.0 * tail_scale) : lower; }
  double domain_hi() const noexcept { return tail_scale > 0.0 ? std::max(upper, 12.0 * tail_scale) : upper; }

  /// Bisection to 1e-12 in x on the truncation domain.
  double quantile(double u) const {
    if (!monotone) throw PreconditionError("quantile of a non-monotone generalized distribution function");
    if (quantile_fn) return quantile_fn(u);
    double lo = domain_lo(), hi = domain_hi();
    if (F(lo) >= u) return lo;
    for (int it = 0; it < 200 && hi - lo > 1e-12 * std::max(1.0, std::abs(lo) + std::abs(hi)); ++it) {
      const double mid = 0.5 * (lo + hi);
      (F(mid) >= u ? hi : lo) = mid;
    }
    return hi;
  }

  double upper_quantile(double v) const {
    if (!monotone) throw PreconditionError("quantile of a non-monotone generalized distribution function");
    return upper_quantile_fn ? upper_quantile_fn(v) : quantile(1.0 - v);
  }
};

namespace detail {

using SharedVec = std::shared_ptr<std::vector<double>>;

/// Quantiles of a purely atomic law with atoms x_k, F(x_k) = cum_k and
/// 1 - F(x_k) = sf_k.
inline void attach_atoms(GeneralizedCDF& g, SharedVec atoms, SharedVec cum, SharedVec sf) {
  g.quantile_fn = [atoms, cum](double u) {
    const auto it = std::lower_bound(cum->begin(), cum->end(), u);
    return it == cum->end() ? atoms->back() : (*atoms)[static_cast<std::size_t>(it - cum->begin())];
  };
  // First k with sf_k <= v; sf is non-increasing.
  g.upper_quantile_fn = [atoms, sf](double v) {
    const auto it = std::lower_bound(sf->begin(), sf->end(), v, std::greater<double>());
    return it == sf->end() ? atoms->back() : (*atoms)[static_cast<std::size_t>(it - sf->begin())];
  };
  g.lower = atoms->front();
  g.upper = atoms->back();
  g.jumps = *atoms;
  g.levels = *cum;
  g.survival = *sf;
}

}  // namespace detail

namespace cdfs {

/// Law of (S - center) / scale for a lattice law S.
inline GeneralizedCDF lattice(const LatticeDistribution& d, double center = 0.0, double scale = 1.0) {
  if (!(scale > 0.0)) throw InputError("scale must be positive");
  auto dp = std::make_shared<LatticeDistribution>(d);
  GeneralizedCDF g;
  g.F = [dp, center, scale](double x) { return dp->cdf(center + scale * x); };
  g.F_left = [dp, center, scale](double x) { return dp->cdf_left(center + scale * x); };
  g.S = [dp, center, scale](double x) { return dp->sf(center + scale * x); };
  g.S_left = [dp, center, scale](double x) { return dp->sf_left(center + scale * x); };
  auto atoms = std::make_shared<std::vector<double>>();
  auto cum = std::make_shared<std::vector<double>>();
  auto sf = std::make_shared<std::vector<double>>();
  double above = 0.0;
  for (std::size_t k = d.size(); k-- > 0;) {
    if (d.mass(k) == 0.0) continue;
    atoms->push_back((d.value(k) - center) / scale);
    cum->push_back(d.cdf_at_index(k));
    sf->push_back(above);
    above += d.mass(k);
  }
  std::reverse(atoms->begin(), atoms->end());
  std::reverse(cum->begin(), cum->end());
  std::reverse(sf->begin(), sf->end());
  detail::attach_atoms(g, atoms, cum, sf);
  g.label = "lattice";
  return g;
}

/// Law of (X - center) / scale for a piecewise-polynomial density.
inline GeneralizedCDF piecewise(const PiecewisePolyCDF& d, double center = 0.0, double scale = 1.0) {
  if (!(scale > 0.0)) throw InputError("scale must be positive");
  auto dp = std::make_shared<PiecewisePolyCDF>(d);
  GeneralizedCDF g;
  g.F = [dp, center, scale](double x) { return dp->cdf(center + scale * x); };
  g.S = [dp, center, scale](double x) { return dp->sf(center + scale * x); };
  g.lower = (d.lower() - center) / scale;
  g.upper = (d.upper() - center) / scale;
  g.label = "piecewise";
  return g;
}

inline GeneralizedCDF normal(double mu = 0.0, double sd = 1.0) {
  if (!(sd > 0.0)) throw InputError("normal law needs sd > 0");
  GeneralizedCDF g;
  g.F = [mu, sd](double x) { return normal_cdf((x - mu) / sd); };
  g.S = [mu, sd](double x) { return normal_sf((x - mu) / sd); };
  g.quantile_fn = [mu, sd](double u) {
    if (u <= 0.0) return -std::numeric_limits<double>::infinity();
    if (u >= 1.0) return std::numeric_limits<double>::infinity();
    return mu + sd * normal_quantile(u);
  };
  g.upper_quantile_fn = [mu, sd](double v) {
    if (v <= 0.0) return std::numeric_limits<double>::infinity();
    return mu - sd * normal_quantile(v);
  };
  g.tail_scale = sd;
  g.label = "normal";
  g.lower = mu - 12.0 * sd;
  g.upper = mu + 12.0 * sd;
  return g;
}

inline GeneralizedCDF point_mass(double a) { return lattice(LatticeDistribution::point_mass(a)); }

/// Psi_{r,n} of an expansion; signed in general.
inline GeneralizedCDF expansion(const EdgeworthExpansion& e) {
  GeneralizedCDF g;
  g.F = [e](double x) { return e.cdf(x); };
  g.S = [e](double x) { return e.sf(x); };
  g.monotone = false;
  g.lower = -kExpansionClamp;
  g.upper = kExpansionClamp;
  g.tail_scale = 1.0;
  g.label = "expansion";
  return g;
}

inline GeneralizedCDF expansion(const RebasedExpansion& e) {
  GeneralizedCDF g;
  g.F = [e](double x) { return e.cdf(x); };
  g.S = [e](double x) { return e.sf(x); };
  g.monotone = false;
  const double a = e.normalization().a(), v = e.normalization().v();
  g.lower = (-kExpansionClamp - v) / a;
  g.upper = (kExpansionClamp - v) / a;
  g.tail_scale = 1.0 / a;
  g.label = "expansion";
  return g;
}

/// Empirical law of (sample - center) / scale.
inline GeneralizedCDF empirical(const MonteCarloECDF& mc, double center = 0.0, double scale = 1.0) {
  std::vector<double> v, m;
  for (double x : mc.sample) {
    if (!v.empty() && x == v.back())
      m.back() += 1.0;
    else {
      v.push_back(x);
      m.push_back(1.0);
    }
  }
  auto pts = std::make_shared<std::vector<double>>();
  auto cum = std::make_shared<std::vector<double>>();
  auto sf = std::make_shared<std::vector<double>>();
  const double N = static_cast<double>(mc.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    acc += m[i];
    pts->push_back((v[i] - center) / scale);
    cum->push_back(acc / N);
    sf->push_back((N - acc) / N);
  }
  cum->back() = 1.0;
  GeneralizedCDF g;
  detail::attach_atoms(g, pts, cum, sf);
  g.F = [pts, cum](double x) {
    const auto it = std::upper_bound(pts->begin(), pts->end(), x);
    return it == pts->begin() ? 0.0 : (*cum)[static_cast<std::size_t>(it - pts->begin()) - 1];
  };
  g.F_left = [pts, cum](double x) {
    const auto it = std::lower_bound(pts->begin(), pts->end(), x);
    return it == pts->begin() ? 0.0 : (*cum)[static_cast<std::size_t>(it - pts->begin()) - 1];
  };
  g.S = [pts, sf](double x) {
    const auto it = std::upper_bound(pts->begin(), pts->end(), x);
    return it == pts->begin() ? 1.0 : (*sf)[static_cast<std::size_t>(it - pts->begin()) - 1];
  };
  g.S_left = [pts, sf](double x) {
    const auto it = std::lower_bound(pts->begin(), pts->end(), x);
    return it == pts->begin() ? 1.0 : (*sf)[static_cast<std::size_t>(it - pts->begin()) - 1];
  };
  g.label = "empirical";
  return g;
}

}  // namespace cdfs

}  // namespace nuedge

#endif  // NUEDGE_TRANSPORT_CDF_HPP
