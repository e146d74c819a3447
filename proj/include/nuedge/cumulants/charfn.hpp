#ifndef NUEDGE_CUMULANTS_CHARFN_HPP
#define NUEDGE_CUMULANTS_CHARFN_HPP

#include <cmath>
#include <complex>
#include <functional>
#include <numeric>
#include <string>
#include <vector>

#include "nuedge/cumulants/moments.hpp"
#include "nuedge/errors.hpp"
#include "nuedge/models/lattice.hpp"
#include "nuedge/models/piecewise.hpp"

namespace nuedge {

using cplx = std::complex<double>;
using ComplexVec = std::vector<cplx>;

inline constexpr int kMaxCharFnDerivative = 16;

/// psi^{(k)}(t) = sum_x p(x) (i(x-center))^k e^{it(x-center)} for k = 0..kmax.
inline ComplexVec charfn_lattice_derivatives(const LatticeDistribution& d, double t, int kmax, double center = 0.0) {
  if (kmax < 0 || kmax > kMaxCharFnDerivative)
    throw CapabilityError("characteristic-function derivative order above " + std::to_string(kMaxCharFnDerivative));
  std::vector<double> re(static_cast<std::size_t>(kmax) + 1, 0.0), im(re.size(), 0.0);
  const double x0 = d.offset() - center, h = d.step();
  // e^{itx} advanced by rotation, resynchronised every 512 sites.
  const cplx rot = std::polar(1.0, t * h);
  cplx e(0.0, 0.0);
  for (std::size_t k = 0; k < d.size(); ++k) {
    const double x = x0 + static_cast<double>(k) * h;
    if (k % 512 == 0) e = std::polar(1.0, t * x);
    const double p = d.mass(k);
    if (p != 0.0) {
      double w = p;
      for (int j = 0; j <= kmax; ++j) {
        re[static_cast<std::size_t>(j)] += w * e.real();
        im[static_cast<std::size_t>(j)] += w * e.imag();
        w *= x;
      }
    }
    e *= rot;
  }
  ComplexVec out(re.size());
  cplx ipow(1.0, 0.0);
  for (std::size_t j = 0; j < out.size(); ++j) {
    out[j] = ipow * cplx(re[j], im[j]);
    ipow *= cplx(0.0, 1.0);
  }
  return out;
}

/// Single derivative psi_n^{(k)}(t) of an exact lattice law.
inline cplx charfn_lattice(const LatticeDistribution& d, double t, int deriv_order) {
  if (std::abs(std::accumulate(d.masses().begin(), d.masses().end(), 0.0) + d.pruned_mass() - 1.0) > 1e-12)
    throw PreconditionError("lattice law is not normalized");
  return charfn_lattice_derivatives(d, t, deriv_order).back();
}

/// Truncated Taylor series product, degree <= K.
inline ComplexVec series_multiply(const ComplexVec& a, const ComplexVec& b, std::size_t K) {
  ComplexVec r(K + 1, cplx(0.0, 0.0));
  for (std::size_t i = 0; i <= K && i < a.size(); ++i)
    for (std::size_t j = 0; i + j <= K && j < b.size(); ++j) r[i + j] += a[i] * b[j];
  return r;
}

/// Derivatives of g^n at a point from derivatives of g (binary powering of
/// the Taylor series; no division by g, so zeros of g are harmless).
inline ComplexVec power_derivatives(const ComplexVec& g_derivs, int n) {
  const std::size_t K = g_derivs.size() - 1;
  ComplexVec base(K + 1);
  for (std::size_t k = 0; k <= K; ++k) base[k] = g_derivs[k] / factorial(static_cast<int>(k));
  ComplexVec acc(K + 1, cplx(0.0, 0.0));
  acc[0] = 1.0;
  for (int e = n; e > 0; e >>= 1) {
    if (e & 1) acc = series_multiply(acc, base, K);
    if (e > 1) base = series_multiply(base, base, K);
  }
  for (std::size_t k = 0; k <= K; ++k) acc[k] *= factorial(static_cast<int>(k));
  return acc;
}

/// Derivatives L^{(1..K)} of L = ln f from f^{(0..K)}, using
/// f^{(k)} = sum_{j<k} C(k-1, j) L^{(j+1)} f^{(k-1-j)}.
inline ComplexVec log_derivatives(const ComplexVec& f) {
  const std::size_t K = f.size() - 1;
  ComplexVec L(K + 1, cplx(0.0, 0.0));
  for (std::size_t k = 1; k <= K; ++k) {
    cplx acc = f[k];
    for (std::size_t j = 0; j + 1 < k; ++j)
      acc -= binomial(static_cast<int>(k - 1), static_cast<int>(j)) * L[j + 1] * f[k - 1 - j];
    L[k] = acc / f[0];
  }
  return L;
}

/// Exact characteristic function of a centered sum S_n: psi_n(u) = E e^{iuS_n}.
struct CharFnSource {
  int n = 0;
  double sigma = 0.0;
  /// Returns psi_n^{(k)}(u), k = 0..kmax.
  std::function<ComplexVec(double, int)> derivs;
  bool degenerate() const noexcept { return !(sigma > 0.0); }
};

inline CharFnSource charfn_source(const LatticeDistribution& d, int n) {
  const double mean = d.mean();
  return {n, std::sqrt(d.variance()),
          [d, mean](double u, int kmax) { return charfn_lattice_derivatives(d, u, kmax, mean); }};
}

/// Sum of n iid copies of the centered base law: psi_n = psi_base^n.
inline CharFnSource charfn_source_iid(const PiecewisePolyCDF& base, int n) {
  PiecewisePolyCDF centered = base.shifted(base.mean());
  return {n, std::sqrt(n * centered.variance()), [centered, n](double u, int kmax) {
            return power_derivatives(centered.charfn_derivatives(u, kmax), n);
          }};
}

}  // namespace nuedge

#endif  // NUEDGE_CUMULANTS_CHARFN_HPP
