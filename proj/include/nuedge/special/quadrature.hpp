#ifndef NUEDGE_SPECIAL_QUADRATURE_HPP
#define NUEDGE_SPECIAL_QUADRATURE_HPP

#include <algorithm>
#include <cmath>
#include <queue>
#include <span>
#include <string>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "nuedge/errors.hpp"

namespace nuedge {

struct QuadResult {
  double value = 0.0;
  double error = 0.0;  ///< Kronrod error estimate, summed over panels.
  double l1 = 0.0;     ///< integral of |f|
  bool converged = true;
};

struct QuadOptions {
  double rel_tol = 1e-10;
  double abs_tol = 1e-14;
  unsigned max_depth = 18;
};

/// Adaptive Gauss-Kronrod (7/15) on a finite interval.
template <class F>
QuadResult integrate(F&& f, double a, double b, const QuadOptions& opt = {}) {
  QuadResult r;
  if (a == b) return r;
  double err = 0.0, l1 = 0.0;
  r.value = boost::math::quadrature::gauss_kronrod<double, 15>::integrate(f, a, b, opt.max_depth,
                                                                          opt.rel_tol, &err, &l1);
  r.error = err;
  r.l1 = l1;
  r.converged = std::isfinite(r.value) && err <= std::max(opt.rel_tol * l1 * 10.0, opt.abs_tol);
  return r;
}

/// One Gauss-Kronrod 7/15 evaluation on [a, b]; the error is |K15 - G7|.
/// Boost's nodes and weights are used directly because its non-adaptive
/// error estimate does not scale with the panel width.
template <class F>
QuadResult gk15(F&& f, double a, double b) {
  using K = boost::math::quadrature::gauss_kronrod<double, 15>;
  using G = boost::math::quadrature::gauss<double, 7>;
  const auto& x = K::abscissa();
  const auto& wk = K::weights();
  const auto& wg = G::weights();
  const double c = 0.5 * (a + b), h = 0.5 * (b - a);
  const double f0 = f(c);
  double k = wk[0] * f0, g = wg[0] * f0, l1 = wk[0] * std::abs(f0);
  for (std::size_t i = 1; i < x.size(); ++i) {
    const double fl = f(c - h * x[i]), fr = f(c + h * x[i]);
    k += wk[i] * (fl + fr);
    l1 += wk[i] * (std::abs(fl) + std::abs(fr));
    if (i % 2 == 0) g += wg[i / 2] * (fl + fr);
  }
  QuadResult r;
  r.value = h * k;
  r.error = std::abs(h * (k - g));
  r.l1 = std::abs(h) * l1;
  return r;
}

/// Globally adaptive Gauss-Kronrod over consecutive panels [pts[i], pts[i+1]]:
/// the interval with the largest error estimate is bisected until the summed
/// error meets max(rel_tol * |integral of |f||, abs_tol). Panels where f is
/// negligible are therefore never refined on their own account.
template <class F>
QuadResult integrate_panels(F&& f, std::span<const double> pts, const QuadOptions& opt = {}) {
  struct Piece {
    double a, b, value, error, l1;
    bool operator<(const Piece& o) const { return error < o.error; }
  };
  auto rule = [&](double a, double b) {
    const auto r = gk15(f, a, b);
    return Piece{a, b, r.value, r.error, r.l1};
  };
  std::priority_queue<Piece> heap;
  QuadResult total;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    if (pts[i] == pts[i + 1]) continue;
    auto p = rule(pts[i], pts[i + 1]);
    total.value += p.value;
    total.error += p.error;
    total.l1 += p.l1;
    heap.push(p);
  }
  const std::size_t budget = heap.size() + (std::size_t{1} << std::min(opt.max_depth, 20u));
  auto target = [&] { return std::max(opt.rel_tol * total.l1, opt.abs_tol); };
  while (!heap.empty() && total.error > target() && heap.size() < budget) {
    const Piece worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b)) {
      heap.push(worst);
      break;
    }
    const Piece l = rule(worst.a, mid), r = rule(mid, worst.b);
    total.value += l.value + r.value - worst.value;
    total.error += l.error + r.error - worst.error;
    total.l1 += l.l1 + r.l1 - worst.l1;
    heap.push(l);
    heap.push(r);
  }
  // Re-sum to shed the drift of the incremental updates.
  total.value = total.error = total.l1 = 0.0;
  for (; !heap.empty(); heap.pop()) {
    total.value += heap.top().value;
    total.error += heap.top().error;
    total.l1 += heap.top().l1;
  }
  total.converged = std::isfinite(total.value) && total.error <= 10.0 * target();
  return total;
}

/// Same as integrate_panels but raises NumericalError on non-convergence.
template <class F>
double integrate_or_throw(F&& f, std::span<const double> pts, const QuadOptions& opt, const char* who) {
  auto r = integrate_panels(f, pts, opt);
  if (!r.converged)
    throw NumericalError(std::string(who) + ": quadrature did not converge", r.error, r.value);
  return r.value;
}

/// Fixed 20-point Gauss-Legendre rule on [a, b]; exact for degree <= 39.
template <class F>
double gauss_legendre(F&& f, double a, double b) {
  return boost::math::quadrature::gauss<double, 20>::integrate(f, a, b);
}

inline std::vector<double> linspace(double a, double b, std::size_t n) {
  std::vector<double> v(n);
  if (n == 1) {
    v[0] = a;
    return v;
  }
  for (std::size_t i = 0; i < n; ++i) v[i] = a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1);
  return v;
}

}  // namespace nuedge

#endif  // NUEDGE_SPECIAL_QUADRATURE_HPP
