#ifndef NUEDGE_CUMULANTS_MOMENTS_HPP
#define NUEDGE_CUMULANTS_MOMENTS_HPP

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "nuedge/errors.hpp"
#include "nuedge/models/lattice.hpp"
#include "nuedge/models/piecewise.hpp"

namespace nuedge {

/// Highest cumulant order tracked anywhere (supports expansions with m <= 8).
inline constexpr int kMaxCumulantOrder = 9;

inline double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return std::round(r);
}

inline double factorial(int n) {
  double r = 1.0;
  for (int i = 2; i <= n; ++i) r *= i;
  return r;
}

/// Raw moments mu_1..mu_J (index 0 holds mu_1) to cumulants kappa_1..kappa_J,
/// via kappa_n = mu_n - sum_{m<n} C(n-1, m-1) kappa_m mu_{n-m}.
inline std::vector<double> moments_to_cumulants(std::span<const double> mu) {
  if (mu.empty()) throw InputError("moments_to_cumulants needs at least one moment");
  const std::size_t J = mu.size();
  auto m = [&](std::size_t k) { return k == 0 ? 1.0L : static_cast<long double>(mu[k - 1]); };
  // Extended precision: the recursion cancels terms of size mu_J.
  std::vector<long double> kappa(J);
  for (std::size_t n = 1; n <= J; ++n) {
    long double acc = m(n);
    for (std::size_t j = 1; j < n; ++j)
      acc -= binomial(static_cast<int>(n - 1), static_cast<int>(j - 1)) * kappa[j - 1] * m(n - j);
    kappa[n - 1] = acc;
  }
  return {kappa.begin(), kappa.end()};
}

/// Inverse of moments_to_cumulants.
inline std::vector<double> cumulants_to_moments(std::span<const double> kappa) {
  if (kappa.empty()) throw InputError("cumulants_to_moments needs at least one cumulant");
  const std::size_t J = kappa.size();
  std::vector<long double> mu(J);
  auto m = [&](std::size_t k) { return k == 0 ? 1.0L : mu[k - 1]; };
  for (std::size_t n = 1; n <= J; ++n) {
    long double acc = 0.0L;
    for (std::size_t j = 1; j <= n; ++j)
      acc += binomial(static_cast<int>(n - 1), static_cast<int>(j - 1)) * static_cast<long double>(kappa[j - 1]) * m(n - j);
    mu[n - 1] = acc;
  }
  return {mu.begin(), mu.end()};
}

/// Cumulants gamma_2..gamma_jmax of S_n together with sigma_n = ||S_n||_2.
class CumulantSequence {
 public:
  CumulantSequence() = default;

  /// `gamma[j]` is gamma_j(S_n); entries 0 and 1 are ignored.
  CumulantSequence(int n, double sigma_n, std::vector<double> gamma) : n_(n), sigma_(sigma_n), gamma_(std::move(gamma)) {
    if (!(sigma_ > 0.0)) throw DegeneracyError("cumulant sequence needs sigma_n > 0");
    if (jmax() < 3) throw InputError("cumulant sequence needs jmax >= 3");
    if (jmax() > kMaxCumulantOrder) throw CapabilityError("cumulant order above " + std::to_string(kMaxCumulantOrder));
    if (std::abs(gamma_[2] - sigma_ * sigma_) > 1e-9 * sigma_ * sigma_)
      throw InputError("gamma_2 must equal sigma_n^2");
  }

  /// Builds from gamma_j(W_n), j = 3..jmax, and sigma_n.
  static CumulantSequence from_normalized(int n, double sigma_n, std::span<const double> gamma_w_from3) {
    std::vector<double> g(gamma_w_from3.size() + 3, 0.0);
    g[2] = sigma_n * sigma_n;
    for (std::size_t i = 0; i < gamma_w_from3.size(); ++i)
      g[i + 3] = gamma_w_from3[i] * std::pow(sigma_n, static_cast<double>(i + 3));
    return CumulantSequence(n, sigma_n, std::move(g));
  }

  int n() const noexcept { return n_; }
  double sigma() const noexcept { return sigma_; }
  int jmax() const noexcept { return static_cast<int>(gamma_.size()) - 1; }

  /// gamma_j(S_n).
  double gamma(int j) const {
    if (j < 2 || j > jmax()) throw InputError("cumulant order " + std::to_string(j) + " not available");
    return gamma_[static_cast<std::size_t>(j)];
  }
  /// gamma_j(W_n) = gamma_j(S_n) sigma_n^{-j}.
  double gamma_normalized(int j) const { return gamma(j) / std::pow(sigma_, j); }

 private:
  int n_ = 0;
  double sigma_ = 1.0;
  std::vector<double> gamma_;
};

namespace detail {

/// Cumulants from standardized moments E[((S-mean)/sd)^j], j=1..jmax.
inline CumulantSequence cumulants_from_standardized(int n, double sd, std::vector<double> zmom) {
  zmom[0] = 0.0;
  zmom[1] = 1.0;
  const auto kw = moments_to_cumulants(zmom);
  std::vector<double> g(kw.size() + 1, 0.0);
  for (std::size_t j = 2; j <= kw.size(); ++j) g[j] = kw[j - 1] * std::pow(sd, static_cast<double>(j));
  g[2] = sd * sd;
  return CumulantSequence(n, sd, std::move(g));
}

}  // namespace detail

/// Cumulants of an exact lattice law (shift invariant for j >= 2).
inline CumulantSequence cumulants_of(const LatticeDistribution& d, int n, int jmax) {
  if (jmax < 3 || jmax > kMaxCumulantOrder) throw CapabilityError("jmax must lie in [3, 9]");
  const double sd = std::sqrt(d.variance());
  if (!(sd > 0.0)) throw DegeneracyError("degenerate lattice law (zero variance)");
  std::vector<double> zmom(static_cast<std::size_t>(jmax), 0.0);
  const double mu = d.mean();
  for (std::size_t k = 0; k < d.size(); ++k) {
    const double z = (d.value(k) - mu) / sd;
    double p = d.mass(k);
    for (int j = 0; j < jmax; ++j) {
      p *= z;
      zmom[static_cast<std::size_t>(j)] += p;
    }
  }
  return detail::cumulants_from_standardized(n, sd, std::move(zmom));
}

/// Cumulants of a piecewise-polynomial law.
inline CumulantSequence cumulants_of(const PiecewisePolyCDF& d, int n, int jmax) {
  if (jmax < 3 || jmax > kMaxCumulantOrder) throw CapabilityError("jmax must lie in [3, 9]");
  const double sd = std::sqrt(d.variance());
  if (!(sd > 0.0)) throw DegeneracyError("degenerate law (zero variance)");
  std::vector<double> zmom(static_cast<std::size_t>(jmax), 0.0);
  for (int j = 1; j <= jmax; ++j) zmom[static_cast<std::size_t>(j - 1)] = d.central_moment(j) / std::pow(sd, j);
  return detail::cumulants_from_standardized(n, sd, std::move(zmom));
}

}  // namespace nuedge

#endif  // NUEDGE_CUMULANTS_MOMENTS_HPP
