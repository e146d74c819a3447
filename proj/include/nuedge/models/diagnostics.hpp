#ifndef NUEDGE_MODELS_DIAGNOSTICS_HPP
#define NUEDGE_MODELS_DIAGNOSTICS_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "nuedge/errors.hpp"
#include "nuedge/models/chain.hpp"
#include "nuedge/models/exact.hpp"

namespace nuedge {

/// Ellipticity constants with uniform probability reference measures, so the
/// transition density of step j is p_j(x, y) = |X_{j+1}| P_j(x, y).
struct EllipticityReport {
  double eps0_upper = 0.0;  ///< 1 / sup p_j(x, y)
  double eps0_lower = 0.0;  ///< inf of the two-step density
  double epsilon0 = 0.0;    ///< min of the two
  bool elliptic = false;
};

/// Checks every step of one period (cyclically, so the pair (L, 1) is
/// included when the kernel list repeats).
inline EllipticityReport ellipticity_check(const MarkovChainSpec& spec) {
  spec.validate();
  const long L = static_cast<long>(spec.period());
  const long pairs = spec.unlimited() || spec.repeat > 1 ? L : std::max(1L, L - 1);
  double sup = 0.0;
  for (long j = 1; j <= L; ++j) {
    const Matrix& P = spec.kernel(j);
    for (double p : P.a) sup = std::max(sup, p * static_cast<double>(P.cols));
  }
  double lower = std::numeric_limits<double>::infinity();
  for (long j = 1; j <= pairs; ++j) {
    const Matrix& P = spec.kernel(j);
    const Matrix& Q = spec.kernel(j + 1);
    if (P.cols != Q.rows) {
      lower = 0.0;
      break;
    }
    // int p_j(x,y) p_{j+1}(y,z) m_{j+1}(dy) = |X_{j+2}| (P_j P_{j+1})(x, z)
    const Matrix PQ = P * Q;
    for (double v : PQ.a) lower = std::min(lower, v * static_cast<double>(Q.cols));
  }
  EllipticityReport r;
  r.eps0_upper = sup > 0.0 ? 1.0 / sup : std::numeric_limits<double>::infinity();
  r.eps0_lower = lower;
  r.epsilon0 = std::min(r.eps0_upper, r.eps0_lower);
  r.elliptic = r.eps0_lower > 0.0 && std::isfinite(sup);
  return r;
}

struct PsiMixingResult {
  double psi = 0.0;
  bool exact = true;     ///< false when only single atoms were scanned
  bool degraded = false; ///< state space above the enumeration limit
};

inline constexpr std::size_t kPsiEnumerationLimit = 12;

/// psi between sigma(X) and sigma(Y) for a joint law J(x, y):
/// sup over events of positive probability of |P(A x B) / (P(A) P(B)) - 1|.
///
/// Up to 12 atoms per side every pair of unions is enumerated (Gray-code walk
/// over B); larger spaces scan single atoms only. For finite spaces the atom
/// scan already attains the supremum, since for fixed B the ratio is a
/// weighted average over the atoms of A, and symmetrically for B.
inline PsiMixingResult psi_from_joint(const Matrix& J) {
  std::vector<std::size_t> rows, cols;
  std::vector<double> pa(J.rows, 0.0), pb(J.cols, 0.0);
  for (std::size_t x = 0; x < J.rows; ++x)
    for (std::size_t y = 0; y < J.cols; ++y) {
      pa[x] += J(x, y);
      pb[y] += J(x, y);
    }
  for (std::size_t x = 0; x < J.rows; ++x)
    if (pa[x] > 0.0) rows.push_back(x);
  for (std::size_t y = 0; y < J.cols; ++y)
    if (pb[y] > 0.0) cols.push_back(y);
  PsiMixingResult r;
  auto consider = [&](double joint, double a, double b) {
    r.psi = std::max(r.psi, std::abs(joint / (a * b) - 1.0));
  };
  if (rows.size() > kPsiEnumerationLimit || cols.size() > kPsiEnumerationLimit) {
    r.exact = false;
    r.degraded = true;
    for (auto x : rows)
      for (auto y : cols) consider(J(x, y), pa[x], pb[y]);
    return r;
  }
  const std::size_t na = rows.size(), nb = cols.size();
  std::vector<double> rowsum(nb);
  for (std::uint32_t A = 1; A < (1u << na); ++A) {
    double PA = 0.0;
    std::fill(rowsum.begin(), rowsum.end(), 0.0);
    for (std::size_t i = 0; i < na; ++i)
      if (A & (1u << i)) {
        PA += pa[rows[i]];
        for (std::size_t k = 0; k < nb; ++k) rowsum[k] += J(rows[i], cols[k]);
      }
    double joint = 0.0, PB = 0.0;
    std::uint32_t B = 0;
    for (std::uint32_t g = 1; g < (1u << nb); ++g) {
      const std::size_t bit = static_cast<std::size_t>(__builtin_ctz(g));
      B ^= 1u << bit;
      const double s = (B >> bit) & 1u ? 1.0 : -1.0;
      joint += s * rowsum[bit];
      PB += s * pb[cols[bit]];
      if (B != 0) consider(joint, PA, PB);
    }
  }
  return r;
}

/// psi between sigma(X_j) and sigma(X_{j+k}).
inline PsiMixingResult psi_mixing(const MarkovChainSpec& spec, long j, long k) {
  spec.validate();
  if (j < 1 || k < 1) throw InputError("psi mixing needs j >= 1 and k >= 1");
  spec.require_steps(j + k - 1);
  const auto marg = spec.marginals(j - 1);
  const auto& pi = marg.back();
  Matrix T = spec.kernel(j);
  for (long i = 1; i < k; ++i) T = T * spec.kernel(j + i);
  Matrix J(T.rows, T.cols);
  for (std::size_t x = 0; x < T.rows; ++x)
    for (std::size_t y = 0; y < T.cols; ++y) J(x, y) = pi[x] * T(x, y);
  return psi_from_joint(J);
}

inline PsiMixingResult psi_mixing_one_step(const MarkovChainSpec& spec, long j) { return psi_mixing(spec, j, 1); }

struct VarianceBlock {
  long first = 0;
  long last = 0;
  double variance = 0.0;
};

/// sigma_n^2 = a_n + b_n with a_n non-decreasing; vectors are indexed by n
/// (entry 0 is n = 0).
struct VarianceDecomposition {
  double A = 0.0;
  long n_max = 0;
  std::vector<VarianceBlock> blocks;
  std::vector<double> sigma2;
  std::vector<double> a;
  std::vector<double> b;
  double sup_abs_b = 0.0;
  /// max(0, max block variance - 2A)
  double overshoot = 0.0;
  bool monotone = true;
  /// sup |b_n| <= 2A + overshoot
  bool remainder_bounded = true;
};

/// 4 max_{j<=n} Var(Y_j) + 1.
inline double default_block_target(const MarkovChainSpec& spec, long n_max) {
  spec.require_steps(n_max);
  const auto means = spec.step_means(n_max);
  std::vector<double> pi = spec.initial;
  double v = 0.0;
  for (long j = 1; j <= n_max; ++j) {
    const Matrix& P = spec.kernel(j);
    const Matrix& f = spec.observable(j);
    const double mu = means[static_cast<std::size_t>(j - 1)];
    double s = 0.0;
    for (std::size_t x = 0; x < P.rows; ++x)
      for (std::size_t y = 0; y < P.cols; ++y) s += pi[x] * P(x, y) * (f(x, y) - mu) * (f(x, y) - mu);
    v = std::max(v, s);
    pi = MarkovChainSpec::propagate(pi, P);
  }
  return 4.0 * v + 1.0;
}

/// Greedy blocking: intervals I_1, I_2, ... chosen left to right, each closed
/// as soon as Var(S_I) >= A. a_n is the variance of the sum over the complete
/// blocks inside [1, n].
inline VarianceDecomposition variance_decomposition(const MarkovChainSpec& spec, long n_max, double A = 0.0) {
  spec.validate();
  spec.require_steps(n_max);
  if (A == 0.0) A = default_block_target(spec, n_max);
  if (!(A > 0.0)) throw InputError("block target A must be positive");
  VarianceDecomposition d;
  d.A = A;
  d.n_max = n_max;
  const auto var = exact_variances(spec, n_max);
  d.sigma2.assign(static_cast<std::size_t>(n_max) + 1, 0.0);
  for (long n = 1; n <= n_max; ++n) d.sigma2[static_cast<std::size_t>(n)] = var[static_cast<std::size_t>(n - 1)];
  if (!(d.sigma2.back() > 1e-12)) throw DegeneracyError("variance of S_n does not grow (degenerate observable)");

  long start = 1;
  while (start <= n_max) {
    const auto v = exact_variances(spec, n_max - start + 1, start);
    auto it = std::find_if(v.begin(), v.end(), [A](double x) { return x >= A; });
    if (it == v.end()) break;
    const long last = start + static_cast<long>(it - v.begin());
    d.blocks.push_back({start, last, *it});
    d.overshoot = std::max(d.overshoot, *it - 2.0 * A);
    start = last + 1;
  }
  if (d.blocks.empty())
    throw DegeneracyError("variance never reaches the block target A = " + std::to_string(A) + " within n_max");

  d.a.assign(d.sigma2.size(), 0.0);
  d.b.assign(d.sigma2.size(), 0.0);
  std::size_t k = 0;
  for (long n = 1; n <= n_max; ++n) {
    while (k < d.blocks.size() && d.blocks[k].last <= n) ++k;
    const auto i = static_cast<std::size_t>(n);
    d.a[i] = k == 0 ? 0.0 : d.sigma2[static_cast<std::size_t>(d.blocks[k - 1].last)];
    d.b[i] = d.sigma2[i] - d.a[i];
    d.sup_abs_b = std::max(d.sup_abs_b, std::abs(d.b[i]));
    if (d.a[i] < d.a[i - 1]) d.monotone = false;
  }
  d.remainder_bounded = d.sup_abs_b <= 2.0 * A + d.overshoot;
  return d;
}

}  // namespace nuedge

#endif  // NUEDGE_MODELS_DIAGNOSTICS_HPP
