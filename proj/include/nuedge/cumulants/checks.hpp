#ifndef NUEDGE_CUMULANTS_CHECKS_HPP
#define NUEDGE_CUMULANTS_CHECKS_HPP

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "nuedge/cumulants/charfn.hpp"
#include "nuedge/cumulants/lambda.hpp"
#include "nuedge/cumulants/moments.hpp"
#include "nuedge/errors.hpp"
#include "nuedge/special/quadrature.hpp"
#include "nuedge/trend.hpp"

namespace nuedge {

struct Assumption3Report {
  int m = 0;
  double epsilon = 0.0;
  std::vector<int> n;
  std::vector<double> sigma;
  /// scaled[j][i] = sigma_{n_i}^{j-2} sup_t |Lambda_{n_i}^{(j)}(t)|, j = 3..m+1.
  std::vector<std::vector<double>> scaled;
  std::vector<double> C;        ///< C[j] = max_i scaled[j][i]
  std::vector<bool> bounded_j;  ///< per-j verdict
  bool bounded = true;
};

/// Empirical constants of the Lambda-derivative bound; bounded when, for every
/// j, the largest n stays within 1.5x the median of the scaled sups.
inline Assumption3Report check_assumption3(const std::vector<LambdaProfile>& profiles, int m,
                                           const TrendRule& rule = {}) {
  if (profiles.empty()) throw InputError("check_assumption3 needs at least one profile");
  if (m < 2) throw InputError("check_assumption3 needs m >= 2");
  Assumption3Report rep;
  rep.m = m;
  rep.epsilon = profiles.front().epsilon;
  const int jtop = std::max(3, m + 1);
  rep.scaled.assign(static_cast<std::size_t>(jtop) + 1, {});
  rep.C.assign(static_cast<std::size_t>(jtop) + 1, 0.0);
  rep.bounded_j.assign(static_cast<std::size_t>(jtop) + 1, true);
  for (const auto& p : profiles) {
    if (p.jmax < jtop) throw InputError("profile lacks derivative order " + std::to_string(jtop));
    rep.n.push_back(p.n);
    rep.sigma.push_back(p.sigma);
    for (int j = 3; j <= jtop; ++j) {
      const double s = p.degenerate ? 0.0 : std::pow(p.sigma, j - 2) * p.sup_abs(j);
      rep.scaled[static_cast<std::size_t>(j)].push_back(s);
    }
  }
  for (int j = 3; j <= jtop; ++j) {
    const auto& v = rep.scaled[static_cast<std::size_t>(j)];
    rep.C[static_cast<std::size_t>(j)] = *std::max_element(v.begin(), v.end());
    const bool ok = bounded_last(v, rule);
    rep.bounded_j[static_cast<std::size_t>(j)] = ok;
    rep.bounded = rep.bounded && ok;
  }
  return rep;
}

struct Assumption6Report {
  int m = 0;
  double c = 0.0;
  double B = 0.0;
  std::vector<int> n;
  std::vector<double> sigma;
  std::vector<double> I;      ///< sigma_n^{m-2} int_{c sigma <= |t| <= B sigma^{m-2}} |f_n^{(m)}(t)/t| dt
  std::vector<double> error;  ///< quadrature error estimate per n
  bool vanishing = false;
};

inline constexpr double kAssumption6Ratio = 0.1;

/// Integral of Assumption 6 in the psi_n form:
/// I_n = sigma_n^{-2} * 2 int_c^{B sigma_n^{m-3}} |psi_n^{(m)}(u) / u| du.
inline double assumption6_integral(const CharFnSource& src, int m, double c, double B, double* err = nullptr) {
  if (src.degenerate()) {
    if (err) *err = 0.0;
    return 0.0;
  }
  const double hi = B * std::pow(src.sigma, m - 3);
  if (!(hi > c)) {
    if (err) *err = 0.0;
    return 0.0;
  }
  // Panels of width ~0.5/sigma resolve the oscillation of psi_n.
  const double width = std::max(0.5 / src.sigma, (hi - c) / 4000.0);
  const auto panels = static_cast<std::size_t>(std::ceil((hi - c) / width));
  const auto pts = linspace(c, hi, panels + 1);
  // |psi^{(m)}| has kinks at zeros of psi^{(m)}, which caps the attainable
  // Kronrod accuracy; the verdict only needs a few digits.
  QuadOptions opt;
  opt.rel_tol = 1e-6;
  opt.abs_tol = 1e-13;
  opt.max_depth = 15;
  auto g = [&](double u) { return std::abs(src.derivs(u, m)[static_cast<std::size_t>(m)]) / u; };
  auto r = integrate_panels(g, pts, opt);
  const double scale = 2.0 / (src.sigma * src.sigma);
  if (!r.converged || !std::isfinite(r.value))
    throw NumericalError("assumption 6 integral did not converge", r.error * scale, r.value * scale);
  if (err) *err = r.error * scale;
  return r.value * scale;
}

/// Verdict "vanishing" iff I at the largest n is at most 0.1 of I at the smallest n.
inline Assumption6Report check_assumption6(const std::vector<CharFnSource>& family, int m, double c = 1.0,
                                           double B = 10.0) {
  if (m < 3) throw PreconditionError("check_assumption6 needs m >= 3");
  if (!(c > 0.0) || !(B > 0.0)) throw PreconditionError("check_assumption6 needs c, B > 0");
  if (family.empty()) throw InputError("check_assumption6 needs at least one n");
  Assumption6Report rep;
  rep.m = m;
  rep.c = c;
  rep.B = B;
  for (const auto& src : family) {
    double e = 0.0;
    rep.I.push_back(assumption6_integral(src, m, c, B, &e));
    rep.error.push_back(e);
    rep.n.push_back(src.n);
    rep.sigma.push_back(src.sigma);
  }
  const double first = rep.I.front(), last = rep.I.back();
  rep.vanishing = last <= 1e-12 || last <= kAssumption6Ratio * first;
  return rep;
}

/// |gamma_j(W_n)| <= C^j j! sigma_n^{-(j-2)} for every available j >= 3.
inline bool check_cumulant_growth(const CumulantSequence& cs, double C) {
  for (int j = 3; j <= cs.jmax(); ++j) {
    const double bound = std::pow(C, j) * factorial(j) * std::pow(cs.sigma(), -(j - 2));
    if (std::abs(cs.gamma_normalized(j)) > bound) return false;
  }
  return true;
}

}  // namespace nuedge

#endif  // NUEDGE_CUMULANTS_CHECKS_HPP
