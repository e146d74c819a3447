#ifndef NUEDGE_MODELS_EXACT_HPP
#define NUEDGE_MODELS_EXACT_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include "nuedge/errors.hpp"
#include "nuedge/models/chain.hpp"
#include "nuedge/models/lattice.hpp"

namespace nuedge {

inline constexpr long kMaxDenominator = 1000000;
inline constexpr double kSnapTolerance = 1e-9;
inline constexpr double kPruneMass = 1e-16;
/// Doubles held by the dynamic programme at any time.
inline constexpr std::size_t kDpBudget = 25'000'000;

/// First continued-fraction convergent p/q of x with |p/q - x| <= tol; the
/// last convergent with q <= qmax when none is that close.
inline std::pair<long, long> rationalize(double x, long qmax, double tol = 0.0) {
  long p0 = 0, q0 = 1, p1 = 1, q1 = 0;
  double r = x;
  for (int it = 0; it < 64; ++it) {
    const double a = std::floor(r);
    if (std::abs(a) > 1e15) break;
    const long ai = static_cast<long>(a);
    const long p2 = ai * p1 + p0, q2 = ai * q1 + q0;
    if (q2 > qmax) break;
    p0 = p1;
    q0 = q1;
    p1 = p2;
    q1 = q2;
    const double err = std::abs(static_cast<double>(p1) / static_cast<double>(q1) - x);
    const double frac = r - a;
    if (err <= std::max(tol, 1e-15 * std::max(1.0, std::abs(x))) || frac < 1e-300) break;
    r = 1.0 / frac;
  }
  return {p1, q1};
}

/// Observables of steps 1..n as offset_j + step * k_j(x, y) with integer k_j >= 0.
struct LatticeSnap {
  double step = 1.0;
  std::vector<double> offset;                  ///< per step
  std::vector<std::vector<std::int64_t>> index;  ///< per period slot, row-major
};

/// Finds a common lattice step for the observables of one period.
///
/// Throws CapabilityError when some difference of values is not a rational
/// multiple (denominator <= 1e6, residual <= 1e-9) of a reference difference.
inline LatticeSnap snap_to_lattice(const MarkovChainSpec& spec) {
  const std::size_t L = spec.period();
  std::vector<double> lo(L);
  std::vector<double> diffs;
  for (std::size_t s = 0; s < L; ++s) {
    const auto& f = spec.observables[s].a;
    lo[s] = *std::min_element(f.begin(), f.end());
    for (double v : f)
      if (v - lo[s] > 0.0) diffs.push_back(v - lo[s]);
  }
  LatticeSnap snap;
  if (diffs.empty()) {
    snap.step = 1.0;
  } else {
    const double d0 = *std::min_element(diffs.begin(), diffs.end());
    std::vector<std::pair<long, long>> frac;
    long Q = 1;
    for (double d : diffs) {
      const auto [p, q] = rationalize(d / d0, kMaxDenominator, kSnapTolerance * std::max(1.0, d) / d0);
      if (q <= 0 || std::abs(static_cast<double>(p) / static_cast<double>(q) * d0 - d) > kSnapTolerance * std::max(1.0, std::abs(d)))
        throw CapabilityError("observables are not on a common lattice; use Monte Carlo (monte_carlo_ecdf)");
      frac.emplace_back(p, q);
      Q = std::lcm(Q, q);
      if (Q > kMaxDenominator) throw CapabilityError("lattice step too fine; use Monte Carlo (monte_carlo_ecdf)");
    }
    long g = Q;
    for (const auto& [p, q] : frac) g = std::gcd(g, p * (Q / q));
    snap.step = d0 * static_cast<double>(g) / static_cast<double>(Q);
  }
  snap.index.resize(L);
  for (std::size_t s = 0; s < L; ++s) {
    const auto& f = spec.observables[s].a;
    auto& idx = snap.index[s];
    idx.resize(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) {
      const double k = std::round((f[i] - lo[s]) / snap.step);
      if (std::abs(lo[s] + k * snap.step - f[i]) > kSnapTolerance * std::max(1.0, std::abs(f[i])))
        throw CapabilityError("observables are not on a common lattice; use Monte Carlo (monte_carlo_ecdf)");
      idx[i] = static_cast<std::int64_t>(k);
    }
  }
  snap.offset = lo;
  return snap;
}

/// Exact laws of S_n = sum_{j<=n} (Y_j - E Y_j) for every n in `ns`
/// (ascending), from one sweep of the dynamic programme over
/// (state, accumulated lattice index).
inline std::vector<LatticeDistribution> exact_distributions(const MarkovChainSpec& spec, std::vector<long> ns) {
  spec.validate();
  if (ns.empty()) return {};
  if (!std::is_sorted(ns.begin(), ns.end())) throw InputError("n values must be increasing");
  const long nmax = ns.back();
  spec.require_steps(nmax);
  if (ns.front() < 1) throw InputError("number of steps must be >= 1");
  const LatticeSnap snap = snap_to_lattice(spec);
  const auto means = spec.step_means(nmax);

  // mass[x * width + i] = P(X_j = x, index = base + i)
  std::size_t states = spec.initial.size();
  std::size_t width = 1;
  std::int64_t base = 0;
  std::vector<double> mass(spec.initial);
  double pruned = 0.0, offset = 0.0;
  std::vector<LatticeDistribution> out;
  std::size_t next = 0;

  for (long j = 1; j <= nmax; ++j) {
    const std::size_t slot = static_cast<std::size_t>((j - 1) % static_cast<long>(spec.period()));
    const Matrix& P = spec.kernels[slot];
    const auto& idx = snap.index[slot];
    const std::int64_t kmax = *std::max_element(idx.begin(), idx.end());
    const std::size_t nw = width + static_cast<std::size_t>(kmax);
    const std::size_t ns2 = P.cols;
    if (nw * std::max(ns2, states) > kDpBudget)
      throw ResourceError("exact distribution exceeds the memory budget at n = " + std::to_string(j));
    std::vector<double> nm(ns2 * nw, 0.0);
    for (std::size_t x = 0; x < states; ++x) {
      const double* src = &mass[x * width];
      for (std::size_t y = 0; y < ns2; ++y) {
        const double p = P(x, y);
        if (p == 0.0) continue;
        double* dst = &nm[y * nw + static_cast<std::size_t>(idx[x * ns2 + y])];
        for (std::size_t i = 0; i < width; ++i) dst[i] += p * src[i];
      }
    }
    offset += snap.offset[slot] - means[static_cast<std::size_t>(j - 1)];
    // Prune negligible cells and trim the common index range.
    std::size_t first = nw, last = 0;
    for (std::size_t y = 0; y < ns2; ++y)
      for (std::size_t i = 0; i < nw; ++i) {
        double& v = nm[y * nw + i];
        if (v != 0.0 && v < kPruneMass) {
          pruned += v;
          v = 0.0;
        }
        if (v != 0.0) {
          first = std::min(first, i);
          last = std::max(last, i);
        }
      }
    if (first > last) throw NumericalError("all probability mass was pruned", pruned);
    width = last - first + 1;
    mass.assign(ns2 * width, 0.0);
    for (std::size_t y = 0; y < ns2; ++y)
      std::copy_n(&nm[y * nw + first], width, &mass[y * width]);
    base += static_cast<std::int64_t>(first);
    states = ns2;

    while (next < ns.size() && ns[next] == j) {
      std::vector<double> law(width, 0.0);
      for (std::size_t y = 0; y < states; ++y)
        for (std::size_t i = 0; i < width; ++i) law[i] += mass[y * width + i];
      out.emplace_back(offset + static_cast<double>(base) * snap.step, snap.step, std::move(law), pruned);
      ++next;
    }
  }
  return out;
}

/// Exact law of S_n = sum_{j<=n} (Y_j - E Y_j).
inline LatticeDistribution exact_distribution(const MarkovChainSpec& spec, long n) {
  return exact_distributions(spec, {n}).front();
}

/// Exact E[S_n] and Var(S_n) for n = 1..nmax from a forward moment recursion
/// over states; element n-1 holds n.
inline std::vector<double> exact_variances(const MarkovChainSpec& spec, long nmax, long start = 1) {
  spec.validate();
  spec.require_steps(start + nmax - 1);
  const auto means = spec.step_means(start + nmax - 1);
  std::vector<double> pi = spec.initial;
  for (long j = 1; j < start; ++j) pi = MarkovChainSpec::propagate(pi, spec.kernel(j));
  std::vector<double> m0 = pi, m1(pi.size(), 0.0), m2(pi.size(), 0.0);
  std::vector<double> var(static_cast<std::size_t>(nmax));
  for (long j = start; j < start + nmax; ++j) {
    const Matrix& P = spec.kernel(j);
    const Matrix& f = spec.observable(j);
    const double mu = means[static_cast<std::size_t>(j - 1)];
    std::vector<double> a(P.cols, 0.0), b(P.cols, 0.0), c(P.cols, 0.0);
    for (std::size_t x = 0; x < P.rows; ++x)
      for (std::size_t y = 0; y < P.cols; ++y) {
        const double p = P(x, y);
        if (p == 0.0) continue;
        const double v = f(x, y) - mu;
        a[y] += p * m0[x];
        b[y] += p * (m1[x] + v * m0[x]);
        c[y] += p * (m2[x] + 2.0 * v * m1[x] + v * v * m0[x]);
      }
    m0 = std::move(a);
    m1 = std::move(b);
    m2 = std::move(c);
    const double e1 = std::accumulate(m1.begin(), m1.end(), 0.0);
    const double e2 = std::accumulate(m2.begin(), m2.end(), 0.0);
    var[static_cast<std::size_t>(j - start)] = e2 - e1 * e1;
  }
  return var;
}

}  // namespace nuedge

#endif  // NUEDGE_MODELS_EXACT_HPP
