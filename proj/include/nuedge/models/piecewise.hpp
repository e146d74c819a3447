#ifndef NUEDGE_MODELS_PIECEWISE_HPP
#define NUEDGE_MODELS_PIECEWISE_HPP

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <string>
#include <vector>

#include "nuedge/errors.hpp"
#include "nuedge/special/polynomial.hpp"
#include "nuedge/special/quadrature.hpp"

namespace nuedge {

/// Distribution with a piecewise-polynomial density on a bounded support.
///
/// Piece i lives on [breaks[i], breaks[i+1]] and its density polynomial is
/// stored in the local coordinate u = x - breaks[i]. Local storage keeps
/// high-degree convolution powers well conditioned.
class PiecewisePolyCDF {
 public:
  static constexpr std::size_t kMaxPieces = 20000;

  PiecewisePolyCDF(std::vector<double> breaks, std::vector<DensePolynomial> local_density)
      : breaks_(std::move(breaks)), dens_(std::move(local_density)) {
    if (breaks_.size() < 2 || dens_.size() + 1 != breaks_.size())
      throw InputError("piecewise density needs n+1 breakpoints for n pieces");
    for (std::size_t i = 0; i + 1 < breaks_.size(); ++i)
      if (!(breaks_[i + 1] > breaks_[i])) throw InputError("breakpoints must be strictly increasing");
    if (dens_.size() > kMaxPieces) throw ResourceError("piece count exceeds budget");
    build_cdf();
    validate();
  }

  /// Uniform law on [a, b].
  static PiecewisePolyCDF uniform(double a, double b) {
    return PiecewisePolyCDF({a, b}, {DensePolynomial::constant(1.0 / (b - a))});
  }

  /// Pieces given as polynomials in the global coordinate x.
  static PiecewisePolyCDF from_global(std::vector<double> breaks, const std::vector<DensePolynomial>& global) {
    std::vector<DensePolynomial> local;
    local.reserve(global.size());
    for (std::size_t i = 0; i < global.size(); ++i) local.push_back(global[i].compose_affine(1.0, breaks[i]));
    return PiecewisePolyCDF(std::move(breaks), std::move(local));
  }

  std::size_t pieces() const noexcept { return dens_.size(); }
  const std::vector<double>& breakpoints() const noexcept { return breaks_; }
  const DensePolynomial& local_density(std::size_t i) const noexcept { return dens_[i]; }
  double lower() const noexcept { return breaks_.front(); }
  double upper() const noexcept { return breaks_.back(); }
  int max_degree() const noexcept {
    int d = 0;
    for (const auto& p : dens_) d = std::max(d, p.degree());
    return d;
  }

  double density(double x) const noexcept {
    if (x < breaks_.front() || x > breaks_.back()) return 0.0;
    const std::size_t i = locate(x);
    return dens_[i](x - breaks_[i]);
  }

  double cdf(double x) const noexcept {
    if (x <= breaks_.front()) return 0.0;
    if (x >= breaks_.back()) return 1.0;
    const std::size_t i = locate(x);
    const double partial = cdf_local_[i](x - breaks_[i]);
    const double below = cum_[i] + partial;
    if (below <= 0.5) return below;
    return 1.0 - (surv_[i + 1] + (piece_mass_[i] - partial));
  }

  /// 1 - cdf(x) without cancellation in the upper tail.
  double sf(double x) const noexcept {
    if (x <= breaks_.front()) return 1.0;
    if (x >= breaks_.back()) return 0.0;
    const std::size_t i = locate(x);
    const double partial = cdf_local_[i](x - breaks_[i]);
    const double below = cum_[i] + partial;
    if (below <= 0.5) return 1.0 - below;
    return surv_[i + 1] + (piece_mass_[i] - partial);
  }

  /// Integral of x^q f(x) dx, exact for integer q >= 0.
  double raw_moment(int q) const { return moment_impl(q, 0.0, false); }
  double central_moment(int q) const { return moment_impl(q, mean(), false); }
  /// Integral of |x|^q f(x) dx, exact for integer q >= 0.
  double absolute_moment(int q) const { return moment_impl(q, 0.0, true); }
  double mean() const { return raw_moment(1); }
  double variance() const {
    const double m = mean();
    return raw_moment(2) - m * m;
  }
  double total_mass() const noexcept { return cum_.back(); }

  /// Derivatives psi^{(k)}(u) = E[(iX)^k e^{iuX}] for k = 0..kmax.
  std::vector<std::complex<double>> charfn_derivatives(double u, int kmax) const {
    std::vector<std::complex<double>> out(static_cast<std::size_t>(kmax) + 1, {0.0, 0.0});
    const std::complex<double> I(0.0, 1.0);
    for (std::size_t i = 0; i < dens_.size(); ++i) {
      const double a = breaks_[i], w = breaks_[i + 1] - breaks_[i];
      const int panels = std::max(1, static_cast<int>(std::ceil(std::abs(u) * w / 4.0)) +
                                         (dens_[i].degree() + kmax) / 30);
      const double h = w / panels;
      for (int k = 0; k <= kmax; ++k) {
        double re = 0.0, im = 0.0;
        for (int p = 0; p < panels; ++p) {
          const double lo = p * h, hi = (p + 1) * h;
          re += gauss_legendre([&](double t) { return dens_[i](t) * std::pow(a + t, k) * std::cos(u * (a + t)); },
                               lo, hi);
          im += gauss_legendre([&](double t) { return dens_[i](t) * std::pow(a + t, k) * std::sin(u * (a + t)); },
                               lo, hi);
        }
        out[static_cast<std::size_t>(k)] += std::pow(I, k) * std::complex<double>(re, im);
      }
    }
    return out;
  }

  /// Law of X - c.
  PiecewisePolyCDF shifted(double c) const {
    std::vector<double> b = breaks_;
    for (auto& v : b) v -= c;
    return PiecewisePolyCDF(std::move(b), dens_);
  }

  /// Exact density of X + Y for independent X ~ *this, Y ~ other.
  PiecewisePolyCDF convolve(const PiecewisePolyCDF& other) const;

 private:
  std::size_t locate(double x) const noexcept {
    auto it = std::upper_bound(breaks_.begin(), breaks_.end(), x);
    std::size_t i = static_cast<std::size_t>(it - breaks_.begin());
    i = i == 0 ? 0 : i - 1;
    return std::min(i, dens_.size() - 1);
  }

  void build_cdf() {
    cdf_local_.clear();
    piece_mass_.clear();
    cum_.assign(dens_.size() + 1, 0.0);
    surv_.assign(dens_.size() + 1, 0.0);
    for (std::size_t i = 0; i < dens_.size(); ++i) {
      cdf_local_.push_back(dens_[i].antiderivative());
      piece_mass_.push_back(cdf_local_.back()(breaks_[i + 1] - breaks_[i]));
      cum_[i + 1] = cum_[i] + piece_mass_.back();
    }
    for (std::size_t i = dens_.size(); i-- > 0;) surv_[i] = surv_[i + 1] + piece_mass_[i];
  }

  void validate() const {
    if (std::abs(cum_.back() - 1.0) > 1e-10)
      throw InputError("piecewise density integrates to " + std::to_string(cum_.back()));
    for (std::size_t i = 0; i < dens_.size(); ++i) {
      const double w = breaks_[i + 1] - breaks_[i];
      for (int s = 0; s <= 8; ++s)
        if (dens_[i](w * s / 8.0) < -1e-12) throw InputError("piecewise density is negative");
    }
  }

  double moment_impl(int q, double center, bool absolute) const {
    double acc = 0.0;
    for (std::size_t i = 0; i < dens_.size(); ++i) {
      const double a = breaks_[i], b = breaks_[i + 1];
      // (x - center)^q in the local coordinate u = x - a.
      const DensePolynomial xq = DensePolynomial::monomial(q).compose_affine(1.0, a - center);
      const DensePolynomial prim = (xq * dens_[i]).antiderivative();
      const double split = center - a;
      if (absolute && split > 0.0 && split < b - a) {
        const double left = prim(split) - prim(0.0);
        const double right = prim(b - a) - prim(split);
        const double sgn = (q % 2 == 0) ? 1.0 : -1.0;
        acc += sgn * left + right;
      } else {
        double v = prim(b - a) - prim(0.0);
        if (absolute && b <= center && q % 2 == 1) v = -v;
        acc += v;
      }
    }
    return acc;
  }

  std::vector<double> breaks_;
  std::vector<DensePolynomial> dens_;
  std::vector<DensePolynomial> cdf_local_;
  std::vector<double> piece_mass_;
  std::vector<double> cum_;
  std::vector<double> surv_;
};

namespace detail {

/// Bivariate polynomial sum_{i,j} g[i][j] y^i t^j.
using Bivariate = std::vector<std::vector<double>>;

/// p(t) * q(y - t) expanded in (y, t).
inline Bivariate convolution_kernel(const DensePolynomial& p, const DensePolynomial& q) {
  const int dp = std::max(p.degree(), 0), dq = std::max(q.degree(), 0);
  Bivariate g(static_cast<std::size_t>(dq) + 1, std::vector<double>(static_cast<std::size_t>(dp + dq) + 1, 0.0));
  // q(y - t) = sum_m q_m sum_i C(m,i) y^i (-t)^{m-i}
  std::vector<std::vector<double>> binom(static_cast<std::size_t>(dq) + 1);
  for (int m = 0; m <= dq; ++m) {
    binom[static_cast<std::size_t>(m)].assign(static_cast<std::size_t>(m) + 1, 1.0);
    for (int i = 1; i < m; ++i)
      binom[static_cast<std::size_t>(m)][static_cast<std::size_t>(i)] =
          binom[static_cast<std::size_t>(m - 1)][static_cast<std::size_t>(i - 1)] +
          binom[static_cast<std::size_t>(m - 1)][static_cast<std::size_t>(i)];
  }
  for (int m = 0; m <= dq; ++m) {
    const double qm = q[m];
    if (qm == 0.0) continue;
    for (int i = 0; i <= m; ++i) {
      const double c = qm * binom[static_cast<std::size_t>(m)][static_cast<std::size_t>(i)] * (((m - i) % 2) ? -1.0 : 1.0);
      for (int a = 0; a <= dp; ++a)
        g[static_cast<std::size_t>(i)][static_cast<std::size_t>(m - i + a)] += c * p[a];
    }
  }
  return g;
}

/// Antiderivative in t (vanishing at t = 0) evaluated at t = slope*y + shift.
inline DensePolynomial antiderivative_at(const Bivariate& g, double slope, double shift) {
  DensePolynomial out;
  const DensePolynomial lin({shift, slope});
  for (std::size_t i = 0; i < g.size(); ++i) {
    DensePolynomial prim_t;  // polynomial in t
    std::vector<double> c(g[i].size() + 1, 0.0);
    for (std::size_t j = 0; j < g[i].size(); ++j) c[j + 1] = g[i][j] / static_cast<double>(j + 1);
    prim_t = DensePolynomial(std::move(c));
    out += DensePolynomial::monomial(static_cast<int>(i)) * prim_t.compose_affine(slope, shift);
  }
  return out;
}

}  // namespace detail

inline PiecewisePolyCDF PiecewisePolyCDF::convolve(const PiecewisePolyCDF& other) const {
  struct Region {
    double lo, hi;
    DensePolynomial poly;  // in y = x - origin
    double origin;
  };
  std::vector<Region> regions;
  std::vector<double> cuts;
  for (std::size_t i = 0; i < dens_.size(); ++i) {
    const double a = breaks_[i], wf = breaks_[i + 1] - a;
    for (std::size_t k = 0; k < other.dens_.size(); ++k) {
      const double b = other.breaks_[k], wg = other.breaks_[k + 1] - b;
      const auto g = detail::convolution_kernel(dens_[i], other.dens_[k]);
      const double y1 = std::min(wf, wg), y2 = std::max(wf, wg), y3 = wf + wg;
      const double ys[4] = {0.0, y1, y2, y3};
      for (int r = 0; r < 3; ++r) {
        if (!(ys[r + 1] > ys[r])) continue;
        const double mid = 0.5 * (ys[r] + ys[r + 1]);
        // lower limit: 0 or y - wg; upper limit: y or wf
        const bool lower_moves = mid > wg;
        const bool upper_moves = mid < wf;
        DensePolynomial up = upper_moves ? detail::antiderivative_at(g, 1.0, 0.0) : detail::antiderivative_at(g, 0.0, wf);
        DensePolynomial lo = lower_moves ? detail::antiderivative_at(g, 1.0, -wg) : DensePolynomial();
        regions.push_back({a + b + ys[r], a + b + ys[r + 1], up - lo, a + b});
      }
      cuts.push_back(a + b);
      cuts.push_back(a + b + y1);
      cuts.push_back(a + b + y2);
      cuts.push_back(a + b + y3);
    }
  }
  std::sort(cuts.begin(), cuts.end());
  std::vector<double> merged;
  for (double c : cuts) {
    const double tol = 1e-9 * (1.0 + std::abs(c));
    if (merged.empty() || c - merged.back() > tol) merged.push_back(c);
  }
  if (merged.size() - 1 > kMaxPieces) throw ResourceError("convolution piece count exceeds budget");
  std::vector<DensePolynomial> local(merged.size() - 1);
  for (const auto& reg : regions) {
    const double tol = 1e-9 * (1.0 + std::abs(reg.lo) + std::abs(reg.hi));
    auto it = std::lower_bound(merged.begin(), merged.end(), reg.lo - tol);
    for (std::size_t j = static_cast<std::size_t>(it - merged.begin()); j + 1 < merged.size(); ++j) {
      if (merged[j] >= reg.hi - tol) break;
      local[j] += reg.poly.compose_affine(1.0, merged[j] - reg.origin);
    }
  }
  return PiecewisePolyCDF(std::move(merged), std::move(local));
}

/// Exact law of the sum of n iid copies of the centered base variable.
inline PiecewisePolyCDF iid_continuous_distribution(const PiecewisePolyCDF& base, int n) {
  if (n < 1 || n > 64) throw CapabilityError("iid convolution supports 1 <= n <= 64");
  const PiecewisePolyCDF centered = base.shifted(base.mean());
  PiecewisePolyCDF acc = centered;
  for (int k = 1; k < n; ++k) acc = acc.convolve(centered);
  return acc;
}

}  // namespace nuedge

#endif  // NUEDGE_MODELS_PIECEWISE_HPP
